//! Matrix exponential by scaling and squaring with diagonal Padé approximants
//! (Higham 2005, "The scaling and squaring method for the matrix exponential revisited").

use super::{CMatrix, C64};

const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA_13: f64 = 5.371920351148152e0;

const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn pade_coefficients(m: usize) -> Vec<f64> {
    match m {
        3 => vec![120.0, 60.0, 12.0, 1.0],
        5 => vec![30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0],
        7 => vec![17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0],
        9 => vec![
            17643225600.0,
            8821612800.0,
            2075673600.0,
            302702400.0,
            30270240.0,
            2162160.0,
            110880.0,
            3960.0,
            90.0,
            1.0,
        ],
        _ => B13.to_vec(),
    }
}

fn norm1(m: &CMatrix) -> f64 {
    (0..m.ncols()).map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

fn s(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn pade(a: &CMatrix, m: usize) -> CMatrix {
    let n = a.nrows();
    let b = pade_coefficients(m);
    let id = CMatrix::identity(n, n);
    let a2 = a * a;
    let (u, v) = if m < 13 {
        let mut pows = vec![id.clone(), a2.clone()];
        for _ in 2..=(m / 2) {
            let next = pows.last().unwrap() * &a2;
            pows.push(next);
        }
        let mut u_inner = CMatrix::zeros(n, n);
        let mut v = CMatrix::zeros(n, n);
        for (k, p) in pows.iter().enumerate() {
            u_inner += p * s(b[2 * k + 1]);
            v += p * s(b[2 * k]);
        }
        (a * u_inner, v)
    } else {
        let a4 = &a2 * &a2;
        let a6 = &a4 * &a2;
        let u1 = &a6 * (&a6 * s(b[13]) + &a4 * s(b[11]) + &a2 * s(b[9]));
        let u = a * (u1 + &a6 * s(b[7]) + &a4 * s(b[5]) + &a2 * s(b[3]) + &id * s(b[1]));
        let v1 = &a6 * (&a6 * s(b[12]) + &a4 * s(b[10]) + &a2 * s(b[8]));
        let v = v1 + &a6 * s(b[6]) + &a4 * s(b[4]) + &a2 * s(b[2]) + &id * s(b[0]);
        (u, v)
    };
    let p = &v + &u;
    let q = &v - &u;
    q.lu().solve(&p).expect("Padé denominator is nonsingular inside the theta bounds")
}

/// `exp(m)` for a square complex matrix.
pub fn expm(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "expm needs a square matrix");
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    let nrm = norm1(m);
    if nrm == 0.0 {
        return CMatrix::identity(n, n);
    }
    for (deg, theta) in THETA {
        if nrm <= theta {
            return pade(m, deg);
        }
    }
    let sq = ((nrm / THETA_13).log2().ceil()).max(0.0) as i32;
    let scaled = m * s(0.5f64.powi(sq));
    let mut r = pade(&scaled, 13);
    for _ in 0..sq {
        r = &r * &r;
    }
    r
}
