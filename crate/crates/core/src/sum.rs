//! Compensated accumulation for Boltzmann-weighted class sums.

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// `max` of a sequence of log-weights, used as the common shift before
/// exponentiating. Returns `-inf` for an empty input.
pub fn log_shift<I: IntoIterator<Item = f64>>(logs: I) -> f64 {
    logs.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

/// `ln(sum_i exp(x_i))` with a single max shift and compensated summation.
pub fn log_sum_exp(logs: &[f64]) -> f64 {
    let shift = log_shift(logs.iter().copied());
    if shift == f64::NEG_INFINITY {
        return shift;
    }
    let s: CompensatedSum = logs.iter().map(|&x| (x - shift).exp()).collect();
    shift + s.value().ln()
}
