use super::SolveError;
use crate::cauchy::CubePoint;
use crate::equations::{Corner, EquationDef};
use crate::scalar::Scalar;
use std::collections::HashMap;

/// Memoized solution of the equation on the unit cube with data on the staircase.
///
/// A point `x` off the staircase has a zero before a one. Taking the first
/// zero `i` and the last one `j`, the face spanned by directions `i, j`
/// through `x` has its other three corners `x − e_j`, `x + e_i − e_j` and
/// `x + e_i`, each with strictly fewer such inversions, so the recursion ends
/// on the staircase and every step is one explicit corner solve.
pub struct CubeEvaluator<'a, T> {
    eq: &'a EquationDef,
    params: Vec<T>,
    memo: HashMap<CubePoint, T>,
    steps: usize,
}

impl<'a, T: Scalar> CubeEvaluator<'a, T> {
    /// `params[i]` is the parameter of cube direction `i`.
    pub fn new(eq: &'a EquationDef, params: Vec<T>) -> Self {
        CubeEvaluator { eq, params, memo: HashMap::new(), steps: 0 }
    }

    /// Data along the staircase: `values[k]` sits at the point with `k` leading ones.
    pub fn with_staircase(eq: &'a EquationDef, params: Vec<T>, values: &[T]) -> Self {
        let dim = params.len();
        assert_eq!(values.len(), dim + 1, "one value per staircase vertex");
        let mut c = Self::new(eq, params);
        for (k, x) in values.iter().enumerate() {
            c.insert(CubePoint::staircase(dim, k), x.clone());
        }
        c
    }

    pub fn insert(&mut self, p: CubePoint, value: T) {
        self.memo.insert(p, value);
    }

    /// Number of corner solves performed so far.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn evaluated(&self) -> usize {
        self.memo.len()
    }

    pub fn evaluate(&mut self, target: &CubePoint) -> Result<T, SolveError> {
        let mut stack = vec![target.clone()];
        while let Some(x) = stack.last().cloned() {
            if self.memo.contains_key(&x) {
                stack.pop();
                continue;
            }
            let dim = x.dim();
            let i = (0..dim).find(|&i| !x.get(i));
            let j = (0..dim).rev().find(|&j| x.get(j));
            let (i, j) = match (i, j) {
                (Some(i), Some(j)) if i < j => (i, j),
                // on the staircase but without data
                _ => return Err(SolveError::Singular(None)),
            };
            let base = x.with(j, false);
            let side = base.with(i, true);
            let far = x.with(i, true);
            let missing: Vec<CubePoint> = [&base, &side, &far]
                .into_iter()
                .filter(|p| !self.memo.contains_key(*p))
                .cloned()
                .collect();
            if !missing.is_empty() {
                stack.extend(missing);
                continue;
            }
            // face (v, v1, v2, v12) = (base, base + e_i, x, base + e_i + e_j)
            let zero = T::zero();
            let corners = [&self.memo[&base], &self.memo[&side], &zero, &self.memo[&far]];
            let value = self
                .eq
                .solve_corner(Corner::V2, corners, &self.params[i], &self.params[j])
                .map_err(|_| SolveError::Singular(None))?;
            self.steps += 1;
            self.memo.insert(x, value);
            stack.pop();
        }
        Ok(self.memo[target].clone())
    }
}
