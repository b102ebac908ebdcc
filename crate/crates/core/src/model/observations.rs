use super::state::Dims;
use crate::epidata::IliPanel;

/// Observed proportions on the log scale, as the likelihood consumes them.
///
/// Storing `ln y` and `ln(1 - y)` keeps simulated data usable when a draw
/// underflows to 0 or rounds to 1 in linear scale.
#[derive(Debug, Clone, PartialEq)]
pub struct Observations {
    pub dims: Dims,
    ln_y: Vec<f64>,
    ln_1my: Vec<f64>,
    present: Vec<bool>,
}

impl Observations {
    pub fn all_missing(dims: Dims) -> Self {
        let n = dims.cells();
        Observations {
            dims,
            ln_y: vec![0.0; n],
            ln_1my: vec![0.0; n],
            present: vec![false; n],
        }
    }

    pub fn from_panel(panel: &IliPanel) -> Self {
        let dims = Dims::new(panel.n_regions(), panel.n_seasons(), panel.n_weeks());
        let mut obs = Self::all_missing(dims);
        for r in 0..dims.r {
            for s in 0..dims.s {
                for t in 0..dims.t {
                    if let Some(y) = panel.get(r, s, t) {
                        obs.set(r, s, t, y);
                    }
                }
            }
        }
        obs
    }

    pub fn set(&mut self, r: usize, s: usize, t: usize, y: f64) {
        self.set_logs(r, s, t, y.ln(), (-y).ln_1p());
    }

    pub fn set_logs(&mut self, r: usize, s: usize, t: usize, ln_y: f64, ln_1my: f64) {
        let i = self.dims.cell(r, s, t);
        self.ln_y[i] = ln_y;
        self.ln_1my[i] = ln_1my;
        self.present[i] = true;
    }

    pub fn clear(&mut self, r: usize, s: usize, t: usize) {
        let i = self.dims.cell(r, s, t);
        self.present[i] = false;
    }

    /// `(ln y, ln(1 - y))` of the flat cell index, if present.
    #[inline]
    pub fn logs_at(&self, cell: usize) -> Option<(f64, f64)> {
        self.present[cell].then(|| (self.ln_y[cell], self.ln_1my[cell]))
    }

    pub fn get(&self, r: usize, s: usize, t: usize) -> Option<f64> {
        self.logs_at(self.dims.cell(r, s, t)).map(|(ly, _)| ly.exp())
    }

    pub fn is_present(&self, r: usize, s: usize, t: usize) -> bool {
        self.present[self.dims.cell(r, s, t)]
    }

    pub fn n_present(&self) -> usize {
        self.present.iter().filter(|&&p| p).count()
    }
}
