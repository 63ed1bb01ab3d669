//! Test-only oracles, written independently of the library's code paths.
#![allow(dead_code)]

use gatemon_sim::fock::SystemSpec;
use nalgebra::DMatrix;

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations,
/// ascending. Operates on a plain row-major copy.
pub fn jacobi_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut a: Vec<f64> = (0..n * n).map(|k| m[(k / n, k % n)]).collect();
    let at = |a: &[f64], r: usize, c: usize| a[r * n + c];

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|r| (0..n).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|(r, c)| at(&a, r, c).powi(2))
            .sum();
        let diag: f64 = (0..n).map(|r| at(&a, r, r).powi(2)).sum();
        if off <= 1e-34 * diag.max(1.0) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = at(&a, p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = at(&a, p, p);
                let aqq = at(&a, q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut values: Vec<f64> = (0..n).map(|r| a[r * n + r]).collect();
    values.sort_by(f64::total_cmp);
    values
}

fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (ar, ac, br, bc) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    DMatrix::from_fn(ar * br, ac * bc, |r, c| a[(r / br, c / bc)] * b[(r % br, c % bc)])
}

fn annihilation(levels: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(levels, levels);
    for n in 1..levels {
        a[(n - 1, n)] = (n as f64).sqrt();
    }
    a
}

/// Single-mode operator placed on mode `which` of the tensor product.
fn embed(op: &DMatrix<f64>, which: usize, levels: &[usize]) -> DMatrix<f64> {
    levels.iter().enumerate().fold(DMatrix::from_element(1, 1, 1.0), |acc, (k, &l)| {
        let factor = if k == which { op.clone() } else { DMatrix::identity(l, l) };
        kron(&acc, &factor)
    })
}

/// The Hamiltonian assembled from Kronecker-embedded ladder operators.
pub fn kron_hamiltonian(spec: &SystemSpec) -> DMatrix<f64> {
    let levels: Vec<usize> = spec.modes.iter().map(|m| m.levels).collect();
    let dim: usize = levels.iter().product();
    let ops: Vec<DMatrix<f64>> = (0..levels.len()).map(|k| embed(&annihilation(levels[k]), k, &levels)).collect();
    let mut h = DMatrix::zeros(dim, dim);
    for (k, mode) in spec.modes.iter().enumerate() {
        let a = &ops[k];
        let ad = a.transpose();
        h += &ad * a * mode.frequency + &ad * &ad * a * a * (mode.anharmonicity / 2.0);
    }
    for c in &spec.couplings {
        let [i, j] = c.pair;
        let xi = &ops[i] - ops[i].transpose();
        let xj = &ops[j] - ops[j].transpose();
        h += xi * xj * c.strength;
    }
    h
}
