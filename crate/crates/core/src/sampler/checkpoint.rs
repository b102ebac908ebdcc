//! Binary and CSV files of flat named draw vectors.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::PosteriorDraws;
use crate::error::{DanteError, Result};
use crate::model::{Dims, ModelState};

const MAGIC: &[u8; 8] = b"DANTEDRW";
const VERSION: u32 = 1;

fn put_u32(w: &mut impl Write, v: u32) -> std::io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn put_u64(w: &mut impl Write, v: u64) -> std::io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn get<const N: usize>(r: &mut impl Read) -> std::io::Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)?;
    Ok(b)
}

/// Writes every draw as `chain id, f64 × n_params` after a header holding the
/// dimensions and parameter names.
pub fn write_draws(draws: &PosteriorDraws, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| DanteError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let run = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        w.write_all(MAGIC)?;
        put_u32(w, VERSION)?;
        let d = draws.dims;
        for v in [d.r, d.s, d.t] {
            put_u64(w, v as u64)?;
        }
        let names = ModelState::names(d);
        put_u64(w, names.len() as u64)?;
        for n in &names {
            put_u32(w, n.len() as u32)?;
            w.write_all(n.as_bytes())?;
        }
        put_u64(w, draws.len() as u64)?;
        for (st, &c) in draws.draws.iter().zip(&draws.chain_id) {
            put_u32(w, c as u32)?;
            for v in st.to_flat() {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        w.flush()
    };
    run(&mut w).map_err(|e| DanteError::io(path, e))
}

type Decoded = (Dims, Vec<(usize, Vec<f64>)>);

pub fn read_draws(path: &Path) -> Result<PosteriorDraws> {
    let file = File::open(path).map_err(|e| DanteError::io(path, e))?;
    let mut r = BufReader::new(file);
    let bad = |msg: String| DanteError::Parse { path: path.to_path_buf(), line: 0, message: msg };
    let mut run = || -> std::io::Result<std::result::Result<Decoded, String>> {
        if &get::<8>(&mut r)? != MAGIC {
            return Ok(Err("not a draws file".into()));
        }
        let version = u32::from_le_bytes(get(&mut r)?);
        if version != VERSION {
            return Ok(Err(format!("unsupported draws file version {version}")));
        }
        let mut dim = [0usize; 3];
        for v in &mut dim {
            *v = u64::from_le_bytes(get(&mut r)?) as usize;
        }
        let dims = Dims::new(dim[0], dim[1], dim[2]);
        let n_params = u64::from_le_bytes(get(&mut r)?) as usize;
        if n_params != dims.n_params() {
            return Ok(Err(format!("{n_params} parameters do not match dimensions {dim:?}")));
        }
        let expected = ModelState::names(dims);
        for name in &expected {
            let len = u32::from_le_bytes(get(&mut r)?) as usize;
            let mut buf = vec![0u8; len];
            r.read_exact(&mut buf)?;
            if buf != name.as_bytes() {
                return Ok(Err(format!("unexpected parameter name, wanted {name}")));
            }
        }
        let n_draws = u64::from_le_bytes(get(&mut r)?) as usize;
        let mut out = Vec::with_capacity(n_draws);
        for _ in 0..n_draws {
            let chain = u32::from_le_bytes(get(&mut r)?) as usize;
            let mut flat = Vec::with_capacity(n_params);
            for _ in 0..n_params {
                flat.push(f64::from_le_bytes(get(&mut r)?));
            }
            out.push((chain, flat));
        }
        Ok(Ok((dims, out)))
    };
    let (dims, rows) = run().map_err(|e| DanteError::io(path, e))?.map_err(bad)?;
    let mut states = Vec::with_capacity(rows.len());
    let mut chain_id = Vec::with_capacity(rows.len());
    for (i, (c, flat)) in rows.into_iter().enumerate() {
        let st = ModelState::from_flat(dims, &flat)
            .ok_or_else(|| DanteError::Numerical(format!("draw {} lies outside the support", i + 1)))?;
        states.push(st);
        chain_id.push(c);
    }
    Ok(PosteriorDraws::new(dims, states, chain_id))
}

/// One row per draw: `chain` then every named parameter.
pub fn write_draws_csv(draws: &PosteriorDraws, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["chain".to_string()];
    header.extend(ModelState::names(draws.dims));
    w.write_record(&header)?;
    for (st, c) in draws.draws.iter().zip(&draws.chain_id) {
        let mut row = vec![c.to_string()];
        row.extend(st.to_flat().iter().map(f64::to_string));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| DanteError::io(path, e))
}
