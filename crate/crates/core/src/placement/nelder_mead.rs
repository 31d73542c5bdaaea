//! Nelder-Mead simplex search on the unit box `[0, 1]^n`.
//!
//! Trial points are clamped to the box. When the simplex collapses the search restarts once
//! around the best vertex; it stops when a restart brings no improvement.

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexSettings<T> {
    /// Stop when every vertex lies within this (infinity-norm) distance of the best one.
    pub xtol: T,
    pub max_evaluations: usize,
    /// Edge length of the initial simplex.
    pub initial_step: T,
    pub max_restarts: usize,
}

impl<T: Real> Default for SimplexSettings<T> {
    fn default() -> Self {
        Self {
            xtol: T::lit(1e-6),
            max_evaluations: 2000,
            initial_step: T::lit(0.1),
            max_restarts: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxEvaluations,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexOutcome<T> {
    pub best: Vec<T>,
    pub best_value: T,
    pub evaluations: usize,
    pub iterations: usize,
    pub termination: Termination,
}

fn clamp_unit<T: Real>(x: &mut [T]) {
    for c in x.iter_mut() {
        *c = c.max(T::zero()).min(T::one());
    }
}

struct Search<'a, T, F> {
    f: &'a mut F,
    evaluations: usize,
    budget: usize,
    _t: std::marker::PhantomData<T>,
}

impl<T: Real, F: FnMut(&[T]) -> T> Search<'_, T, F> {
    fn eval(&mut self, x: &[T]) -> T {
        self.evaluations += 1;
        let v = (self.f)(x);
        if v.is_nan() {
            T::infinity()
        } else {
            v
        }
    }

    fn exhausted(&self) -> bool {
        self.evaluations >= self.budget
    }
}

/// Minimizes `f` over the unit box starting from `start`.
pub fn minimize<T: Real, F: FnMut(&[T]) -> T>(
    mut f: F,
    start: &[T],
    settings: &SimplexSettings<T>,
) -> SimplexOutcome<T> {
    let n = start.len();
    let mut search = Search {
        f: &mut f,
        evaluations: 0,
        budget: settings.max_evaluations.max(1),
        _t: std::marker::PhantomData,
    };
    let mut best: Vec<T> = start.to_vec();
    clamp_unit(&mut best);
    let mut best_value = search.eval(&best);
    let mut iterations = 0;
    let mut termination = Termination::MaxEvaluations;

    for _ in 0..=settings.max_restarts {
        if search.exhausted() {
            break;
        }
        let before = best_value;
        let (x, v, iters, term) = run_simplex(&mut search, &best, best_value, settings);
        iterations += iters;
        termination = term;
        if v < best_value {
            best = x;
            best_value = v;
        }
        if term == Termination::MaxEvaluations || !(best_value < before) {
            break;
        }
    }
    if n == 0 {
        termination = Termination::Converged;
    }
    SimplexOutcome {
        best,
        best_value,
        evaluations: search.evaluations,
        iterations,
        termination,
    }
}

fn run_simplex<T: Real, F: FnMut(&[T]) -> T>(
    search: &mut Search<'_, T, F>,
    x0: &[T],
    f0: T,
    settings: &SimplexSettings<T>,
) -> (Vec<T>, T, usize, Termination) {
    let n = x0.len();
    let (alpha, gamma, rho, sigma) = (T::one(), T::two(), T::half(), T::half());

    let mut simplex: Vec<(Vec<T>, T)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        if search.exhausted() {
            break;
        }
        let mut x = x0.to_vec();
        x[i] = if x0[i] + settings.initial_step <= T::one() {
            x0[i] + settings.initial_step
        } else {
            x0[i] - settings.initial_step
        };
        clamp_unit(&mut x);
        let v = search.eval(&x);
        simplex.push((x, v));
    }
    if simplex.len() < n + 1 {
        let best = simplex
            .into_iter()
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        return (best.0, best.1, 0, Termination::MaxEvaluations);
    }

    let mut iterations = 0;
    let termination = loop {
        // stable sort keeps earlier vertices first among ties
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let spread = simplex[1..].iter().fold(T::zero(), |m, (x, _)| {
            x.iter()
                .zip(&simplex[0].0)
                .fold(m, |m, (a, b)| m.max((*a - *b).abs()))
        });
        if spread < settings.xtol {
            break Termination::Converged;
        }
        if search.exhausted() {
            break Termination::MaxEvaluations;
        }
        iterations += 1;

        let inv_n = T::one() / T::from_usize(n).unwrap();
        let centroid: Vec<T> = (0..n)
            .map(|j| simplex[..n].iter().fold(T::zero(), |s, (x, _)| s + x[j]) * inv_n)
            .collect();
        let worst = simplex[n].clone();
        let along = |t: T| -> Vec<T> {
            let mut p: Vec<T> = centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| *c + t * (*c - *w))
                .collect();
            clamp_unit(&mut p);
            p
        };

        let xr = along(alpha);
        let fr = search.eval(&xr);
        if fr < simplex[0].1 {
            let xe = along(alpha * gamma);
            let fe = search.eval(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst.1 {
            let xc = along(alpha * rho);
            let fc = search.eval(&xc);
            (xc, fc)
        } else {
            let xc = along(-rho);
            let fc = search.eval(&xc);
            (xc, fc)
        };
        if fc < fr.min(worst.1) {
            simplex[n] = (xc, fc);
            continue;
        }
        // shrink toward the best vertex
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            if search.exhausted() {
                break;
            }
            let x: Vec<T> = best
                .iter()
                .zip(&vertex.0)
                .map(|(b, v)| *b + sigma * (*v - *b))
                .collect();
            let v = search.eval(&x);
            *vertex = (x, v);
        }
    };
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let (x, v) = simplex.swap_remove(0);
    (x, v, iterations, termination)
}
