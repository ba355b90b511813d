use crate::numerics::{CMatrix, C64};
use crate::pencil::MatrixPencil;
use crate::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// `E = W diag(I, N) T`, `A = W diag(J, I) T` with `J = diag(ode_eigenvalues)` and `N` made of
/// nilpotent Jordan blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeierstrassSpec {
    pub ode_eigenvalues: Vec<C64>,
    pub nilpotent_block_sizes: Vec<usize>,
    pub transform_seed: u64,
}

impl WeierstrassSpec {
    pub fn dim(&self) -> usize {
        self.ode_eigenvalues.len() + self.nilpotent_block_sizes.iter().sum::<usize>()
    }

    pub fn index(&self) -> usize {
        self.nilpotent_block_sizes.iter().copied().max().unwrap_or(0)
    }
}

fn householder(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let v = CMatrix::from_fn(n, 1, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let nv = v.norm();
    if nv == 0.0 {
        return CMatrix::identity(n, n);
    }
    let v = v / C64::new(nv, 0.0);
    CMatrix::identity(n, n) - &v * v.adjoint() * C64::new(2.0, 0.0)
}

/// Unitary · diagonal (|d| ∈ [1, 3]) · unitary; condition number at most 3.
fn transform(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let d = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::from_polar(1.0, 0.0) * rng.gen_range(1.0..3.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let phase = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
        } else {
            C64::new(0.0, 0.0)
        }
    });
    householder(rng, n) * phase * d * householder(rng, n)
}

/// Returns the pencil and its Kronecker index.
pub fn weierstrass_pencil(spec: &WeierstrassSpec) -> Result<(MatrixPencil, usize)> {
    if spec.nilpotent_block_sizes.iter().any(|&s| s == 0) {
        return Err(crate::Error::InvalidInput("nilpotent block sizes must be at least 1".into()));
    }
    let n = spec.dim();
    let ne = spec.ode_eigenvalues.len();
    let mut e0 = CMatrix::zeros(n, n);
    let mut a0 = CMatrix::zeros(n, n);
    for (i, &l) in spec.ode_eigenvalues.iter().enumerate() {
        e0[(i, i)] = C64::new(1.0, 0.0);
        a0[(i, i)] = l;
    }
    let mut off = ne;
    for &s in &spec.nilpotent_block_sizes {
        for i in 0..s {
            a0[(off + i, off + i)] = C64::new(1.0, 0.0);
            if i + 1 < s {
                e0[(off + i, off + i + 1)] = C64::new(1.0, 0.0);
            }
        }
        off += s;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.transform_seed);
    let w = transform(&mut rng, n);
    let t = transform(&mut rng, n);
    let p = MatrixPencil::new(&w * e0 * &t, &w * a0 * &t)?;
    Ok((p, spec.index()))
}

/// Random spec of dimension at most `max_n` with the requested index: eigenvalues with
/// real part in [−3, −0.2] and imaginary part in [−2, 2], one block of size `index`
/// plus up to two smaller ones.
pub fn random_spec(seed: u64, index: usize, max_n: usize) -> WeierstrassSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut blocks = Vec::new();
    if index > 0 {
        blocks.push(index);
        for _ in 0..rng.gen_range(0..=2) {
            let s = rng.gen_range(1..=index);
            if blocks.iter().sum::<usize>() + s < max_n {
                blocks.push(s);
            }
        }
    }
    let used: usize = blocks.iter().sum();
    let room = max_n.saturating_sub(used).max(1);
    let ne = rng.gen_range(1..=room.min(6));
    let ode_eigenvalues =
        (0..ne).map(|_| C64::new(rng.gen_range(-3.0..-0.2), rng.gen_range(-2.0..2.0))).collect();
    WeierstrassSpec { ode_eigenvalues, nilpotent_block_sizes: blocks, transform_seed: rng.gen() }
}
