//! Dense real symmetric eigendecomposition (cyclic Jacobi).

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

/// Eigenpairs of a real symmetric matrix; `vectors` is row-major with
/// eigenvector `k` stored in column `k`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub dim: usize,
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
}

impl SymmetricEigen {
    /// `a` is row-major `dim × dim` and must be symmetric.
    pub fn new(mut a: Vec<f64>, dim: usize) -> Self {
        assert_eq!(a.len(), dim * dim, "matrix storage does not match dimension");
        let mut v = vec![0.0; dim * dim];
        for i in 0..dim {
            v[i * dim + i] = 1.0;
        }
        let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        for _sweep in 0..100 {
            let off: f64 = (0..dim)
                .flat_map(|i| (0..dim).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[i * dim + j] * a[i * dim + j])
                .sum::<f64>()
                .sqrt();
            if off <= 1e-15 * scale || off == 0.0 {
                break;
            }
            for p in 0..dim {
                for q in p + 1..dim {
                    let apq = a[p * dim + q];
                    if apq == 0.0 {
                        continue;
                    }
                    let app = a[p * dim + p];
                    let aqq = a[q * dim + q];
                    let tau = (aqq - app) / (2.0 * apq);
                    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                    let t = if tau == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    for k in 0..dim {
                        let akp = a[k * dim + p];
                        let akq = a[k * dim + q];
                        a[k * dim + p] = c * akp - s * akq;
                        a[k * dim + q] = s * akp + c * akq;
                    }
                    for k in 0..dim {
                        let apk = a[p * dim + k];
                        let aqk = a[q * dim + k];
                        a[p * dim + k] = c * apk - s * aqk;
                        a[q * dim + k] = s * apk + c * aqk;
                    }
                    for k in 0..dim {
                        let vkp = v[k * dim + p];
                        let vkq = v[k * dim + q];
                        v[k * dim + p] = c * vkp - s * vkq;
                        v[k * dim + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
        let values = (0..dim).map(|i| a[i * dim + i]).collect();
        SymmetricEigen { dim, values, vectors: v }
    }
}
