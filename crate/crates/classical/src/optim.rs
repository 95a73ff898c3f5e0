//! Nelder-Mead simplex minimisation.

#[derive(Debug, Clone)]
pub(crate) struct NelderMeadResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct NelderMead {
    pub max_iter: usize,
    /// Stop when the spread of simplex values falls below
    /// `ftol * (1 + |f_best|)`.
    pub ftol: f64,
    pub xtol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self { max_iter: 20_000, ftol: 1e-12, xtol: 1e-9 }
    }
}

impl NelderMead {
    /// Minimises `f` from `x0` with an axis-aligned initial simplex of the
    /// given per-coordinate `step`. Infinite objective values act as walls.
    pub fn minimize<F: Fn(&[f64]) -> f64>(&self, f: F, x0: &[f64], step: &[f64]) -> NelderMeadResult {
        let n = x0.len();
        let eval = |x: &[f64]| {
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };
        let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
        for i in 0..n {
            let mut p = x0.to_vec();
            p[i] += step[i];
            simplex.push(p);
        }
        let mut values: Vec<f64> = simplex.iter().map(|p| eval(p)).collect();
        let mut iterations = 0;
        let mut converged = false;

        while iterations < self.max_iter {
            let mut idx: Vec<usize> = (0..=n).collect();
            idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            simplex = idx.iter().map(|&i| simplex[i].clone()).collect();
            values = idx.iter().map(|&i| values[i]).collect();

            let (best, worst) = (values[0], values[n]);
            let size = simplex[1..]
                .iter()
                .flat_map(|p| p.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if best.is_finite()
                && (worst - best) <= self.ftol * (1.0 + best.abs())
                && size <= self.xtol * (1.0 + simplex[0].iter().map(|v| v.abs()).fold(0.0, f64::max))
            {
                converged = true;
                break;
            }
            iterations += 1;

            let centroid: Vec<f64> =
                (0..n).map(|j| simplex[..n].iter().map(|p| p[j]).sum::<f64>() / n as f64).collect();
            let towards =
                |t: f64| -> Vec<f64> { centroid.iter().zip(&simplex[n]).map(|(c, w)| c + t * (w - c)).collect() };

            let reflected = towards(-1.0);
            let fr = eval(&reflected);
            if fr < values[0] {
                let expanded = towards(-2.0);
                let fe = eval(&expanded);
                if fe < fr {
                    simplex[n] = expanded;
                    values[n] = fe;
                } else {
                    simplex[n] = reflected;
                    values[n] = fr;
                }
                continue;
            }
            if fr < values[n - 1] {
                simplex[n] = reflected;
                values[n] = fr;
                continue;
            }
            let (contracted, fc) = if fr < values[n] {
                let c = towards(-0.5);
                let fc = eval(&c);
                (c, fc)
            } else {
                let c = towards(0.5);
                let fc = eval(&c);
                (c, fc)
            };
            if fc < values[n].min(fr) {
                simplex[n] = contracted;
                values[n] = fc;
                continue;
            }
            for i in 1..=n {
                let shrunk: Vec<f64> = simplex[i].iter().zip(&simplex[0]).map(|(p, b)| b + 0.5 * (p - b)).collect();
                values[i] = eval(&shrunk);
                simplex[i] = shrunk;
            }
        }

        let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
        NelderMeadResult { x: simplex[best].clone(), f: values[best], iterations, converged }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = NelderMead::default().minimize(f, &[-1.2, 1.0], &[0.1, 0.1]);
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-5 && (r.x[1] - 1.0).abs() < 1e-5, "{:?}", r.x);
    }

    #[test]
    fn respects_infinite_walls() {
        // Minimum of (x-2)^2 restricted to x < 1 sits at the wall.
        let f = |x: &[f64]| if x[0] >= 1.0 { f64::INFINITY } else { (x[0] - 2.0).powi(2) };
        let r = NelderMead::default().minimize(f, &[0.0], &[0.1]);
        assert!(r.x[0] < 1.0 && r.x[0] > 0.999);
    }
}
