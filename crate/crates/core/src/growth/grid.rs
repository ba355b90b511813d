use crate::{Error, Result};

/// Increasing real sample points `λ > ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaGrid {
    pub points: Vec<f64>,
    pub omega: f64,
}

impl Default for LambdaGrid {
    fn default() -> Self {
        Self::log_spaced(1.0, 1e8, 48, 0.0).expect("default grid is valid")
    }
}

impl LambdaGrid {
    /// `ω + s` for `n` log-spaced offsets `s ∈ [min, max]`.
    pub fn log_spaced(min: f64, max: f64, n: usize, omega: f64) -> Result<Self> {
        if !(min > 0.0 && max > min && min.is_finite() && max.is_finite()) || n < 2 || !omega.is_finite() {
            return Err(Error::InvalidInput(format!("bad grid: [{min}, {max}] with {n} points, omega {omega}")));
        }
        let (l0, l1) = (min.log10(), max.log10());
        let points = (0..n).map(|i| omega + 10f64.powf(l0 + (l1 - l0) * i as f64 / (n - 1) as f64)).collect();
        Self::new(points, omega)
    }

    pub fn new(points: Vec<f64>, omega: f64) -> Result<Self> {
        let g = Self { points, omega };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.iter().any(|x| !x.is_finite()) || !self.omega.is_finite() {
            return Err(Error::NonFinite);
        }
        if self.points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("grid points must be strictly increasing".into()));
        }
        if self.points.first().is_some_and(|&x| x <= self.omega) {
            return Err(Error::InvalidInput("grid points must exceed omega".into()));
        }
        Ok(())
    }

    /// Same offsets above a new `ω`.
    pub fn with_omega(&self, omega: f64) -> Self {
        Self {
            points: self.points.iter().map(|&x| x - self.omega + omega).collect(),
            omega,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Evaluates `f` at every point, spread over the available cores.
    pub fn map<T: Send>(&self, f: impl Fn(f64) -> T + Sync) -> Vec<T> {
        let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
        if threads < 2 || self.points.len() < 4 {
            return self.points.iter().map(|&x| f(x)).collect();
        }
        let chunk = self.points.len().div_ceil(threads);
        let f = &f;
        std::thread::scope(|s| {
            let handles: Vec<_> = self
                .points
                .chunks(chunk)
                .map(|c| s.spawn(move || c.iter().map(|&x| f(x)).collect::<Vec<T>>()))
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("grid worker panicked")).collect()
        })
    }
}
