//! Summary tables folded from score, point and HPD records.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::LosoOutput;
use crate::scoring::average_scores;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub model: String,
    /// `skill` (geometric mean), `mse` or `hpd_width` (arithmetic means).
    pub metric: String,
    /// What the rows are grouped by: `scale`, `location`, `target`,
    /// `season` or `scale_target`.
    pub grouping: String,
    pub group: String,
    pub value: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SummaryTable {
    pub rows: Vec<SummaryRow>,
}

impl SummaryTable {
    pub fn get(&self, model: &str, metric: &str, grouping: &str, group: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.model == model && r.metric == metric && r.grouping == grouping && r.group == group)
            .map(|r| r.value)
    }
}

type Key = (String, String, String);

fn group_keys(model: &str, location: &str, scale: &str, target: &str, season: i32) -> Vec<Key> {
    let m = model.to_string();
    vec![
        (m.clone(), "scale".into(), scale.into()),
        (m.clone(), "location".into(), location.into()),
        (m.clone(), "target".into(), target.into()),
        (m.clone(), "season".into(), season.to_string()),
        (m, "scale_target".into(), format!("{scale}/{target}")),
    ]
}

/// Skill by geometric mean, MSE and HPD width by arithmetic mean, each
/// grouped by scale, location, target, season and scale × target.
pub fn summarize(out: &LosoOutput) -> SummaryTable {
    let mut rows = Vec::new();

    let mut skill: BTreeMap<Key, Vec<usize>> = BTreeMap::new();
    for (i, r) in out.scores.iter().enumerate() {
        let keys = group_keys(&r.model, &r.location, &r.scale.to_string(), &r.target.to_string(), r.season);
        for k in keys {
            skill.entry(k).or_default().push(i);
        }
    }
    for ((model, grouping, group), idx) in skill {
        let value = average_scores(idx.iter().map(|&i| &out.scores[i])).expect("non-empty group");
        rows.push(SummaryRow { model, metric: "skill".into(), grouping, group, value, n: idx.len() });
    }

    let mut means = |metric: &str, items: Vec<(Vec<Key>, f64)>| {
        let mut acc: BTreeMap<Key, (f64, usize)> = BTreeMap::new();
        for (keys, v) in items {
            for k in keys {
                let e = acc.entry(k).or_insert((0.0, 0));
                e.0 += v;
                e.1 += 1;
            }
        }
        for ((model, grouping, group), (sum, n)) in acc {
            rows.push(SummaryRow { model, metric: metric.into(), grouping, group, value: sum / n as f64, n });
        }
    };
    means(
        "mse",
        out.points
            .iter()
            .map(|r| {
                let keys = group_keys(&r.model, &r.location, &r.scale.to_string(), &r.target.to_string(), r.season);
                (keys, r.squared_error)
            })
            .collect(),
    );
    means(
        "hpd_width",
        out.hpd
            .iter()
            .map(|r| {
                let keys = group_keys(&r.model, &r.location, &r.scale.to_string(), &r.target.to_string(), r.season);
                (keys, r.width)
            })
            .collect(),
    );
    SummaryTable { rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::PointRecord;
    use crate::forecast::Scale;
    use crate::scoring::{ScoreRecord, TargetKind};

    #[test]
    fn groups_and_means() {
        let mut out = LosoOutput::default();
        for (skill, scale) in [(0.5, Scale::State), (0.125, Scale::State), (0.9, Scale::National)] {
            out.scores.push(ScoreRecord::new("d", "X", scale, 2015, TargetKind::WeekAhead(1), 5, skill));
        }
        for e in [1.0, 3.0] {
            out.points.push(PointRecord {
                model: "d".into(),
                location: "X".into(),
                scale: Scale::State,
                season: 2015,
                target: TargetKind::WeekAhead(1),
                forecast_week: 5,
                prediction: 0.0,
                squared_error: e,
            });
        }
        let t = summarize(&out);
        assert!((t.get("d", "skill", "scale", "state").unwrap() - 0.25).abs() < 1e-12);
        assert!((t.get("d", "skill", "scale", "national").unwrap() - 0.9).abs() < 1e-12);
        assert_eq!(t.get("d", "mse", "target", "1 wk ahead"), Some(2.0));
        assert_eq!(summarize(&out), t);
    }
}
