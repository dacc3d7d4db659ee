//! Compactly supported piecewise polynomials with exact convolution against
//! centred uniform densities.
//!
//! Every averaging kernel in the model is a uniform density (detector jitter,
//! coincidence window, tagger quantization), and every correlation profile is
//! a low-degree polynomial on a few intervals. Convolving a piecewise
//! polynomial with a uniform of half-width `h` amounts to a difference of its
//! antiderivative, `(F(x+h) − F(x−h)) / 2h`, which is again piecewise
//! polynomial, so the whole chain can be evaluated without quadrature.
//!
//! Each piece stores coefficients in the local coordinate `u = x − b_i`
//! measured from its left break. This keeps the coefficients well scaled when
//! the breaks sit at nanosecond offsets.

/// Piecewise polynomial, zero outside `[breaks[0], breaks[n]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePoly {
    breaks: Vec<f64>,
    order: usize,
    coef: Vec<f64>,
}

impl PiecewisePoly {
    /// Builds from breaks and per-piece local coefficients (constant term
    /// first, `order` coefficients per piece).
    pub fn new(breaks: Vec<f64>, order: usize, coef: Vec<f64>) -> Self {
        assert!(breaks.len() >= 2, "need at least one piece");
        assert!(order >= 1);
        assert_eq!(coef.len(), (breaks.len() - 1) * order);
        debug_assert!(breaks.windows(2).all(|w| w[0] <= w[1]));
        PiecewisePoly { breaks, order, coef }
    }

    /// Uniform probability density on `[-h, h]`.
    pub fn uniform(h: f64) -> Self {
        assert!(h > 0.0, "uniform half-width must be positive");
        Self::new(vec![-h, h], 1, vec![0.5 / h])
    }

    /// Rectangle of the given height on `[-h, h]`.
    pub fn rect(h: f64, height: f64) -> Self {
        assert!(h > 0.0);
        Self::new(vec![-h, h], 1, vec![height])
    }

    /// `height · (1 − |x|/w)²` on `[-w, w]`.
    pub fn squared_triangle(w: f64, height: f64) -> Self {
        assert!(w > 0.0);
        let a = height / (w * w);
        Self::new(vec![-w, 0.0, w], 3, vec![0.0, 0.0, a, height, -2.0 * height / w, a])
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn pieces(&self) -> usize {
        self.breaks.len() - 1
    }

    pub fn degree(&self) -> usize {
        self.order - 1
    }

    pub fn support(&self) -> (f64, f64) {
        (self.breaks[0], self.breaks[self.breaks.len() - 1])
    }

    fn piece(&self, i: usize) -> &[f64] {
        &self.coef[i * self.order..(i + 1) * self.order]
    }

    /// Index of the piece containing `x`, or `None` outside the support.
    /// Interior breaks belong to the piece on their right.
    fn locate(&self, x: f64) -> Option<usize> {
        let (lo, hi) = self.support();
        if !(x >= lo && x <= hi) {
            return None;
        }
        let n = self.pieces();
        let i = self.breaks[1..n].partition_point(|&b| b <= x);
        Some(i)
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.locate(x) {
            Some(i) => horner(self.piece(i), x - self.breaks[i]),
            None => 0.0,
        }
    }

    pub fn integral(&self) -> f64 {
        (0..self.pieces())
            .map(|i| {
                let w = self.breaks[i + 1] - self.breaks[i];
                integrate_local(self.piece(i), w)
            })
            .sum()
    }

    pub fn shifted(mut self, s: f64) -> Self {
        for b in &mut self.breaks {
            *b += s;
        }
        self
    }

    pub fn scaled(mut self, a: f64) -> Self {
        for c in &mut self.coef {
            *c *= a;
        }
        self
    }

    /// Convolution with the uniform density on `[-h, h]`; `h == 0` is the
    /// identity.
    pub fn convolve_uniform(&self, h: f64) -> Self {
        assert!(h >= 0.0);
        if h == 0.0 {
            return self.clone();
        }
        let n = self.pieces();
        let order = self.order + 1;
        // antiderivative pieces, anchored so that F is continuous and F(b0) = 0
        let mut anti = Vec::with_capacity(n * order);
        let mut acc = 0.0;
        for i in 0..n {
            let p = self.piece(i);
            anti.push(acc);
            for (k, c) in p.iter().enumerate() {
                anti.push(c / (k + 1) as f64);
            }
            acc += integrate_local(p, self.breaks[i + 1] - self.breaks[i]);
        }
        let total = acc;

        let mut nb: Vec<f64> = self.breaks.iter().map(|b| b - h).chain(self.breaks.iter().map(|b| b + h)).collect();
        nb.sort_by(f64::total_cmp);
        nb.dedup();

        let norm = 0.5 / h;
        let mut coef = vec![0.0; (nb.len() - 1) * order];
        let mut upper = vec![0.0; order];
        let mut lower = vec![0.0; order];
        for j in 0..nb.len() - 1 {
            let s = nb[j];
            let mid = 0.5 * (s + nb[j + 1]);
            self.shifted_antiderivative(&anti, total, mid + h, s + h, &mut upper);
            self.shifted_antiderivative(&anti, total, mid - h, s - h, &mut lower);
            let out = &mut coef[j * order..(j + 1) * order];
            for k in 0..order {
                out[k] = (upper[k] - lower[k]) * norm;
            }
        }
        PiecewisePoly::new(nb, order, coef)
    }

    /// Writes into `out` the coefficients of `u ↦ F(origin + u)` for the
    /// piece of the antiderivative that contains `probe`.
    fn shifted_antiderivative(&self, anti: &[f64], total: f64, probe: f64, origin: f64, out: &mut [f64]) {
        out.iter_mut().for_each(|c| *c = 0.0);
        let (lo, hi) = self.support();
        if probe < lo {
            return;
        }
        if probe > hi {
            out[0] = total;
            return;
        }
        let order = self.order + 1;
        let i = self.locate(probe).expect("probe inside support");
        out.copy_from_slice(&anti[i * order..(i + 1) * order]);
        taylor_shift(out, origin - self.breaks[i]);
    }

    /// Pointwise product; the support is the intersection of both supports.
    pub fn mul(&self, other: &Self) -> Option<Self> {
        let (a0, a1) = self.support();
        let (b0, b1) = other.support();
        let lo = a0.max(b0);
        let hi = a1.min(b1);
        if !(lo < hi) {
            return None;
        }
        let mut nb: Vec<f64> =
            self.breaks.iter().chain(other.breaks.iter()).copied().filter(|&b| b > lo && b < hi).collect();
        nb.push(lo);
        nb.push(hi);
        nb.sort_by(f64::total_cmp);
        nb.dedup();

        let order = self.order + other.order - 1;
        let mut coef = vec![0.0; (nb.len() - 1) * order];
        let mut pa = vec![0.0; self.order];
        let mut pb = vec![0.0; other.order];
        for j in 0..nb.len() - 1 {
            let s = nb[j];
            let mid = 0.5 * (s + nb[j + 1]);
            self.local_at(mid, s, &mut pa);
            other.local_at(mid, s, &mut pb);
            let out = &mut coef[j * order..(j + 1) * order];
            for (k, x) in pa.iter().enumerate() {
                for (l, y) in pb.iter().enumerate() {
                    out[k + l] += x * y;
                }
            }
        }
        Some(PiecewisePoly::new(nb, order, coef))
    }

    /// Local coefficients, re-expanded about `origin`, of the piece that
    /// contains `probe`.
    fn local_at(&self, probe: f64, origin: f64, out: &mut [f64]) {
        match self.locate(probe) {
            Some(i) => {
                out.copy_from_slice(self.piece(i));
                taylor_shift(out, origin - self.breaks[i]);
            }
            None => out.iter_mut().for_each(|c| *c = 0.0),
        }
    }
}

fn horner(c: &[f64], u: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * u + k)
}

fn integrate_local(c: &[f64], w: f64) -> f64 {
    c.iter().enumerate().rev().fold(0.0, |acc, (k, &ck)| acc * w + ck / (k + 1) as f64) * w
}

/// Replaces the coefficients of `p(u)` with those of `p(u + d)`.
fn taylor_shift(c: &mut [f64], d: f64) {
    if d == 0.0 {
        return;
    }
    let n = c.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            c[j] += d * c[j + 1];
        }
    }
}
