//! Compact binary export of trajectory draws.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{Scale, TrajectoryDraws};
use crate::error::{DanteError, Result};

const MAGIC: &[u8; 8] = b"DANTETRJ";

fn scale_code(s: Scale) -> u8 {
    match s {
        Scale::State => 0,
        Scale::Region => 1,
        Scale::National => 2,
    }
}

/// Header (location names and scales, weeks, draws) followed by `f64` values
/// in `[location][week][draw]` order, little-endian.
pub fn write_trajectories(traj: &TrajectoryDraws, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| DanteError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let run = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&(traj.n_locations() as u64).to_le_bytes())?;
        for (name, &scale) in traj.locations.iter().zip(&traj.scales) {
            w.write_all(&(name.len() as u32).to_le_bytes())?;
            w.write_all(name.as_bytes())?;
            w.write_all(&[scale_code(scale)])?;
        }
        w.write_all(&(traj.n_weeks as u64).to_le_bytes())?;
        w.write_all(&(traj.n_draws as u64).to_le_bytes())?;
        for v in traj.values() {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()
    };
    run(&mut w).map_err(|e| DanteError::io(path, e))
}

pub fn read_trajectories(path: &Path) -> Result<TrajectoryDraws> {
    let file = File::open(path).map_err(|e| DanteError::io(path, e))?;
    let mut r = BufReader::new(file);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(|e| DanteError::io(path, e))?;
    if &magic != MAGIC {
        return Err(DanteError::Parse { path: path.to_path_buf(), line: 0, message: "not a trajectory file".into() });
    }
    let mut run = || -> std::io::Result<Option<TrajectoryDraws>> {
        let mut b8 = [0u8; 8];
        let mut b4 = [0u8; 4];
        r.read_exact(&mut b8)?;
        let n_loc = u64::from_le_bytes(b8) as usize;
        let mut locations = Vec::with_capacity(n_loc);
        let mut scales = Vec::with_capacity(n_loc);
        for _ in 0..n_loc {
            r.read_exact(&mut b4)?;
            let mut name = vec![0u8; u32::from_le_bytes(b4) as usize];
            r.read_exact(&mut name)?;
            let mut code = [0u8; 1];
            r.read_exact(&mut code)?;
            let scale = match code[0] {
                0 => Scale::State,
                1 => Scale::Region,
                2 => Scale::National,
                _ => return Ok(None),
            };
            locations.push(String::from_utf8_lossy(&name).into_owned());
            scales.push(scale);
        }
        r.read_exact(&mut b8)?;
        let n_weeks = u64::from_le_bytes(b8) as usize;
        r.read_exact(&mut b8)?;
        let n_draws = u64::from_le_bytes(b8) as usize;
        let mut values = Vec::with_capacity(n_loc * n_weeks * n_draws);
        for _ in 0..n_loc * n_weeks * n_draws {
            r.read_exact(&mut b8)?;
            values.push(f64::from_le_bytes(b8));
        }
        Ok(TrajectoryDraws::from_values(locations, scales, n_weeks, n_draws, values).ok())
    };
    run()
        .map_err(|e| DanteError::io(path, e))?
        .ok_or_else(|| DanteError::Parse { path: path.to_path_buf(), line: 0, message: "corrupt trajectory file".into() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let t = TrajectoryDraws::from_values(
            vec!["AZ".into(), "US National".into()],
            vec![Scale::State, Scale::National],
            2,
            3,
            (0..12).map(|i| i as f64 / 100.0).collect(),
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.bin");
        write_trajectories(&t, &p).unwrap();
        assert_eq!(read_trajectories(&p).unwrap(), t);
    }
}
