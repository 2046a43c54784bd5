//! Polynomial basis expansion.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// All monomials of total degree `<= degree` over `d` inputs, constant first,
/// then graded-lexicographic: `(1, a, b, a^2, ab, b^2, ...)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyBasis {
    d: usize,
    degree: usize,
    /// Each monomial as a sorted list of input indices.
    terms: Vec<Vec<usize>>,
}

impl PolyBasis {
    pub fn new(d: usize, degree: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDimension(0, 1));
        }
        if degree == 0 {
            return Err(Error::param("degree", "must be at least 1"));
        }
        let mut terms = Vec::new();
        terms.push(Vec::new());
        let mut current: Vec<Vec<usize>> = alloc::vec![Vec::new()];
        for _ in 0..degree {
            let mut next = Vec::new();
            for term in &current {
                let start = term.last().copied().unwrap_or(0);
                for i in start..d {
                    let mut t = term.clone();
                    t.push(i);
                    next.push(t);
                }
            }
            terms.extend(next.iter().cloned());
            current = next;
        }
        Ok(PolyBasis { d, degree, terms })
    }

    pub fn input_dim(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn output_dim(&self) -> usize {
        self.terms.len()
    }

    pub fn expand(&self, x: &[f64]) -> Result<Vec<f64>> {
        super::check_dim(self.d, x.len())?;
        Ok(self
            .terms
            .iter()
            .map(|t| t.iter().map(|&i| x[i]).product())
            .collect())
    }
}

/// `C(n, k)` in exact integer arithmetic.
pub fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k.min(n));
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_two_in_two_dims() {
        let b = PolyBasis::new(2, 2).unwrap();
        assert_eq!(b.expand(&[2.0, 3.0]).unwrap(), [1.0, 2.0, 3.0, 4.0, 6.0, 9.0]);
        assert_eq!(b.output_dim(), 6);
    }

    #[test]
    fn zero_vector_expands_to_constant() {
        let b = PolyBasis::new(4, 3).unwrap();
        let e = b.expand(&[0.0; 4]).unwrap();
        assert_eq!(e[0], 1.0);
        assert!(e[1..].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn lengths_match_binomial() {
        assert_eq!(PolyBasis::new(6, 3).unwrap().output_dim(), 84);
        for d in 1..=10 {
            for degree in 1..=3 {
                assert_eq!(
                    PolyBasis::new(d, degree).unwrap().output_dim(),
                    binomial(d + degree, degree),
                    "d={d} degree={degree}"
                );
            }
        }
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(9, 3), 84);
        assert_eq!(binomial(13, 3), 286);
        assert_eq!(binomial(5, 0), 1);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(PolyBasis::new(0, 2).is_err());
        assert!(PolyBasis::new(2, 0).is_err());
        assert!(PolyBasis::new(2, 2).unwrap().expand(&[1.0]).is_err());
    }
}
