//! Configuration assembly and input loading shared by the subcommands.

use std::path::Path;

use dante_core::epidata::{build_aggregate_panel, build_panel, load_weights, parse_ilinet, RawIliRow};
use dante_core::scoring::Baselines;
use dante_core::{Config, IliPanel, SeasonCalendar, WeightMatrix};

use crate::args::{Common, DataArgs};
use crate::{CliError, CliResult};

/// Config file, then `--set` overrides, then `--seed`.
pub fn load_config(common: &Common) -> CliResult<Config> {
    let mut table: toml::Table = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            text.parse()
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        None => toml::Table::new(),
    };
    for item in &common.overrides {
        apply_override(&mut table, item)?;
    }
    let mut cfg = Config::from_toml_str(&table.to_string())?;
    if let Some(seed) = common.seed {
        cfg.mcmc.seed = seed;
    }
    if let Some(n) = common.jobs {
        if n == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(cfg)
}

fn apply_override(table: &mut toml::Table, item: &str) -> CliResult<()> {
    let bad = || CliError::Usage(format!("override {item:?} is not of the form section.key=value"));
    let (key, raw) = item.split_once('=').ok_or_else(bad)?;
    let (section, field) = key.trim().split_once('.').ok_or_else(bad)?;
    if section.is_empty() || field.is_empty() {
        return Err(bad());
    }
    // Bare words such as `mode` are taken as strings.
    let value = format!("v = {}", raw.trim())
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.trim().to_string()));
    let entry = table
        .entry(section.to_string())
        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    let toml::Value::Table(sub) = entry else {
        return Err(bad());
    };
    sub.insert(field.to_string(), value);
    Ok(())
}

pub struct Inputs {
    pub rows: Vec<RawIliRow>,
    pub weights: WeightMatrix,
    pub calendar: SeasonCalendar,
    pub states: IliPanel,
    pub aggregates: Option<IliPanel>,
}

fn season_of(row: &RawIliRow, start_epiweek: u32) -> i32 {
    if row.epiweek >= start_epiweek {
        row.year
    } else {
        row.year - 1
    }
}

/// Reads the ILINet and weight files and builds the state and aggregate
/// panels over the requested (or observed) range of seasons.
pub fn load_inputs(cfg: &Config, data: &DataArgs) -> CliResult<Inputs> {
    let rows = parse_ilinet(&data.input)?;
    let weights = load_weights(&data.weights)?;
    let start = cfg.season.start_epiweek;
    let observed = rows.iter().map(|r| season_of(r, start));
    let (Some(lo), Some(hi)) = (observed.clone().min(), observed.max()) else {
        return Err(CliError::Core(dante_core::DanteError::Consistency(format!(
            "{} holds no rows",
            data.input.display()
        ))));
    };
    let first = data.first_season.unwrap_or(lo);
    let n = match data.n_seasons {
        Some(n) => n,
        None => usize::try_from(hi - first + 1).unwrap_or(0),
    };
    if n == 0 {
        return Err(CliError::Usage(format!("no seasons from {first} in the data")));
    }
    let years: Vec<i32> = (0..n as i32).map(|k| first + k).collect();
    let calendar = cfg.calendar(years);
    let states = build_panel(&rows, &calendar, &weights.states)?;
    let aggregates = build_aggregate_panel(&rows, &calendar, &weights)?;
    Ok(Inputs { rows, weights, calendar, states, aggregates })
}

pub fn load_baselines(path: Option<&Path>) -> CliResult<Baselines> {
    Ok(match path {
        Some(p) => Baselines::load(p)?,
        None => Baselines::default(),
    })
}

pub fn season_index(inputs: &Inputs, season: i32) -> CliResult<usize> {
    inputs
        .calendar
        .season_index(season)
        .ok_or_else(|| CliError::Usage(format!("season {season} is not in the loaded data")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_parse_typed_and_bare_values() {
        let mut t = toml::Table::new();
        apply_override(&mut t, "mcmc.n_chains=2").unwrap();
        apply_override(&mut t, "evaluation.percent_point=mode").unwrap();
        apply_override(&mut t, "model.t_dof = 4.5").unwrap();
        let cfg = Config::from_toml_str(&t.to_string()).unwrap();
        assert_eq!(cfg.mcmc.n_chains, 2);
        assert_eq!(cfg.model.t_dof, 4.5);
        assert!(apply_override(&mut t, "nodot=1").is_err());
        apply_override(&mut t, "mcmc.bogus=1").unwrap();
        assert!(Config::from_toml_str(&t.to_string()).is_err());
    }
}
