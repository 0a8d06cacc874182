//! Derivative-free simplex minimization (Nelder-Mead) used by the entropy
//! supremum search. Deterministic: no randomness, ties broken by index.

/// Outcome of a simplex run.
#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    /// Simplex diameter fell below the tolerance before the iteration cap.
    pub converged: bool,
}

/// Minimize `f` from `x0` with initial per-coordinate step `step`.
///
/// Standard reflection/expansion/contraction/shrink with coefficients
/// 1, 2, 0.5, 0.5. The caller encodes domain constraints by returning
/// `f64::INFINITY` outside the feasible region.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    step: &[f64],
    max_iters: usize,
    diameter_tol: f64,
) -> SimplexResult {
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |f: &mut F, x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let fx0 = eval(&mut f, x0, &mut evals);
    simplex.push((x0.to_vec(), fx0));
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += step[i];
        let fp = eval(&mut f, &p, &mut evals);
        simplex.push((p, fp));
    }

    let mut iterations = 0usize;
    let mut converged = false;
    while iterations < max_iters {
        iterations += 1;
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));

        let mut diam = 0.0f64;
        for s in &simplex[1..] {
            let d: f64 = s
                .0
                .iter()
                .zip(&simplex[0].0)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            diam = diam.max(d);
        }
        if diam < diameter_tol {
            converged = true;
            break;
        }

        // centroid of all but the worst
        let mut centroid = vec![0.0; n];
        for s in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(&s.0) {
                *c += x / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let at = |alpha: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + alpha * (c - w))
                .collect()
        };

        let xr = at(1.0);
        let fr = eval(&mut f, &xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = at(2.0);
            let fe = eval(&mut f, &xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let xc = if fr < worst.1 { at(0.5) } else { at(-0.5) };
            let fc = eval(&mut f, &xc, &mut evals);
            if fc < worst.1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                // shrink toward the best vertex
                let best = simplex[0].0.clone();
                for s in simplex.iter_mut().skip(1) {
                    for (x, b) in s.0.iter_mut().zip(&best) {
                        *x = b + 0.5 * (*x - *b);
                    }
                    let p = s.0.clone();
                    s.1 = eval(&mut f, &p, &mut evals);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    SimplexResult {
        x: simplex[0].0.clone(),
        f: simplex[0].1,
        iterations,
        evaluations: evals,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn minimizes_rosenbrock() {
        let r = nelder_mead(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            &[0.5, 0.5],
            2000,
            1e-10,
        );
        assert!(r.converged);
        assert_relative_eq!(r.x[0], 1.0, epsilon = 1e-5);
        assert_relative_eq!(r.x[1], 1.0, epsilon = 1e-5);
    }

    #[test]
    fn respects_infinite_barrier() {
        // minimum of (x+2)^2 restricted to x >= 0 sits at the boundary
        let r = nelder_mead(
            |x| {
                if x[0] < 0.0 {
                    f64::INFINITY
                } else {
                    (x[0] + 2.0) * (x[0] + 2.0)
                }
            },
            &[1.0],
            &[0.3],
            500,
            1e-12,
        );
        assert!(r.x[0] >= 0.0 && r.x[0] < 1e-5);
    }

    #[test]
    fn reports_non_convergence_at_cap() {
        let r = nelder_mead(
            |x| x[0] * x[0] + x[1] * x[1],
            &[10.0, 10.0],
            &[1.0, 1.0],
            3,
            1e-14,
        );
        assert!(!r.converged);
        assert_eq!(r.iterations, 3);
    }
}
