//! Small dense helpers: determinants and least-squares fits.

/// Determinant of a row-major `n × n` matrix by Gaussian elimination with
/// partial pivoting. The input is consumed as scratch space.
pub fn det(m: &mut [f64], n: usize) -> f64 {
    debug_assert_eq!(m.len(), n * n);
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| m[i * n + c].abs().total_cmp(&m[j * n + c].abs()))
            .unwrap_or(c);
        let pivot = m[p * n + c];
        if pivot == 0.0 {
            return 0.0;
        }
        if p != c {
            for k in 0..n {
                m.swap(p * n + k, c * n + k);
            }
            d = -d;
        }
        d *= pivot;
        for r in c + 1..n {
            let f = m[r * n + c] / pivot;
            if f != 0.0 {
                for k in c..n {
                    m[r * n + k] -= f * m[c * n + k];
                }
            }
        }
    }
    d
}

/// Least-squares line `y ≈ intercept + slope * x`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((my - slope * mx, slope))
}

/// Largest pointwise residual measured against the local term scale `s_i`,
/// floored at `1e-12 * max s` so that vanishing tails do not dominate.
pub fn mixed_norm(residual: &[f64], scale: &[f64]) -> f64 {
    let top = scale.iter().fold(0.0_f64, |m, s| m.max(s.abs()));
    if top == 0.0 {
        return residual.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
    }
    let floor = 1e-12 * top;
    residual
        .iter()
        .zip(scale)
        .map(|(r, s)| r.abs() / s.abs().max(floor))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinants() {
        let mut a = vec![2.0, 1.0, 1.0, 3.0];
        assert!((det(&mut a, 2) - 5.0).abs() < 1e-15);
        let mut b = vec![0.0, 1.0, 2.0, 1.0, 0.0, 3.0, 4.0, -3.0, 8.0];
        assert!((det(&mut b, 3) + 2.0).abs() < 1e-13);
        let mut s = vec![1.0, 2.0, 2.0, 4.0];
        assert_eq!(det(&mut s, 2), 0.0);
    }

    #[test]
    fn line_fit_is_exact_on_lines() {
        let xs = [0.0, 1.0, 2.0, 5.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 2.0 * x).collect();
        let (c, m) = fit_line(&xs, &ys).unwrap();
        assert!((c - 3.0).abs() < 1e-14 && (m + 2.0).abs() < 1e-14);
    }

    #[test]
    fn mixed_norm_floors_small_scales() {
        let r = [1e-20, 1e-3];
        let s = [1e-30, 1.0];
        assert!((mixed_norm(&r, &s) - 1e-3).abs() < 1e-12);
    }
}
