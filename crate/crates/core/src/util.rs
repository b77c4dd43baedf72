//! Small numeric helpers.

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
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
        if !self.sum.is_finite() {
            return self.sum;
        }
        self.sum + self.comp
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator.
pub fn csum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<KahanSum>().value()
}

/// `b^e - a^e` for `0 <= a < b`, `e > 0`, without cancellation when `a` is close to `b`.
pub fn pow_diff(a: f64, b: f64, e: f64) -> f64 {
    if a <= 0.0 {
        return b.powf(e);
    }
    a.powf(e) * (e * ((b - a) / a).ln_1p()).exp_m1()
}

/// `hi^q - lo^q` for `0 <= lo < hi`.
pub fn level_diff(lo: f64, hi: f64, q: f64) -> f64 {
    if lo <= 0.0 {
        return hi.powf(q);
    }
    -hi.powf(q) * (q * (lo / hi).ln()).exp_m1()
}
