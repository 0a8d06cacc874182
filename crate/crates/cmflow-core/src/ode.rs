//! Adaptive Runge-Kutta (Dormand-Prince 5(4)) for the scalar radius ODEs of
//! geodesic-sphere flows.

/// Result of one adaptive integration.
#[derive(Debug, Clone)]
pub struct OdeTrace {
    /// Accepted (t, y) pairs, including the initial state.
    pub points: Vec<(f64, f64)>,
    /// Set when integration stopped because y fell below the floor.
    pub hit_floor: Option<f64>,
}

/// Integrate y' = f(t, y) from (t0, y0) until `t_end` or until y < y_floor,
/// with absolute/relative error control `tol`. `record_times` forces exact
/// landings on the given times (they appear among the accepted points).
pub fn rk45<F: Fn(f64, f64) -> f64>(
    f: F,
    t0: f64,
    y0: f64,
    t_end: f64,
    tol: f64,
    y_floor: f64,
    record_times: &[f64],
) -> OdeTrace {
    // Dormand-Prince coefficients
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    let mut marks: Vec<f64> = record_times
        .iter()
        .copied()
        .filter(|&m| m > t0 && m <= t_end)
        .collect();
    marks.sort_by(f64::total_cmp);
    let mut next_mark = 0usize;

    let mut t = t0;
    let mut y = y0;
    let mut h = ((t_end - t0) / 100.0).min(0.1).max(1e-10);
    let mut points = vec![(t, y)];
    let mut hit_floor = None;

    let max_steps = 2_000_000usize;
    for _ in 0..max_steps {
        if t >= t_end {
            break;
        }
        if y <= y_floor {
            hit_floor = Some(t);
            break;
        }
        let mut h_step = h.min(t_end - t);
        // land exactly on the next requested time
        if next_mark < marks.len() && t + h_step > marks[next_mark] {
            h_step = marks[next_mark] - t;
        }

        let mut k = [0.0f64; 7];
        k[0] = f(t, y);
        let mut failed = false;
        for i in 0..6 {
            let mut yi = y;
            for (j, kj) in k.iter().enumerate().take(i + 1) {
                yi += h_step * A[i][j] * kj;
            }
            if !yi.is_finite() || (i < 5 && yi <= 0.0 && y_floor >= 0.0) {
                failed = true;
                break;
            }
            k[i + 1] = f(t + C[i] * h_step, yi.max(y_floor * 0.5 + 1e-300));
        }
        if failed {
            h_step *= 0.5;
            h = h_step;
            if h < 1e-15 {
                hit_floor = Some(t);
                break;
            }
            continue;
        }

        let mut y5 = y;
        let mut y4 = y;
        for (j, kj) in k.iter().enumerate() {
            y5 += h_step * B5[j] * kj;
            y4 += h_step * B4[j] * kj;
        }
        let err = (y5 - y4).abs();
        let scale = tol * (1.0 + y.abs());
        if err <= scale || h_step <= 1e-14 {
            t += h_step;
            y = y5;
            if next_mark < marks.len() && (t - marks[next_mark]).abs() < 1e-13 {
                next_mark += 1;
            }
            points.push((t, y));
            if y <= y_floor {
                hit_floor = Some(t);
                break;
            }
        }
        // PI-free step update with conventional safety factor
        let factor = if err > 0.0 {
            (0.9 * (scale / err).powf(0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h = (h_step * factor).max(1e-15);
    }
    OdeTrace { points, hit_floor }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_decay() {
        let tr = rk45(|_, y| -y, 0.0, 1.0, 2.0, 1e-10, -1.0, &[1.0]);
        let at1 = tr
            .points
            .iter()
            .find(|(t, _)| (t - 1.0).abs() < 1e-12)
            .expect("requested time recorded");
        assert_relative_eq!(at1.1, (-1.0f64).exp(), max_relative = 1e-8);
        let last = tr.points.last().unwrap();
        assert_relative_eq!(last.0, 2.0, epsilon = 1e-12);
        assert_relative_eq!(last.1, (-2.0f64).exp(), max_relative = 1e-8);
    }

    #[test]
    fn shrinking_circle_hits_floor() {
        // R' = -1/R: R(t) = sqrt(1 - 2t), vanishes at t = 0.5
        let tr = rk45(|_, r| -1.0 / r, 0.0, 1.0, 1.0, 1e-10, 1e-6, &[]);
        let stop = tr.hit_floor.expect("flow reaches the floor");
        assert_relative_eq!(stop, 0.5, epsilon = 1e-5);
        let quarter = tr
            .points
            .iter()
            .min_by(|a, b| (a.0 - 0.25).abs().total_cmp(&(b.0 - 0.25).abs()))
            .unwrap();
        assert_relative_eq!(
            quarter.1,
            (1.0 - 2.0 * quarter.0).sqrt(),
            max_relative = 1e-7
        );
    }
}
