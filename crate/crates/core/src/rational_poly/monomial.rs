use std::cmp::Ordering;

/// Exponent vector of a monomial, one slot per ring variable.
///
/// Ordered graded-lexicographically: total degree first, then the exponent
/// vectors compared slot by slot.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(arity: usize) -> Self {
        Monomial(vec![0; arity])
    }

    /// The monomial consisting of a single variable.
    pub fn var(arity: usize, index: usize) -> Self {
        let mut e = vec![0; arity];
        e[index] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponent(&self, var: usize) -> u32 {
        self.0[var]
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.arity(), other.arity());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn with_exponent(&self, var: usize, e: u32) -> Monomial {
        let mut m = self.0.clone();
        m[var] = e;
        Monomial(m)
    }

    /// All exponent vectors of the given arity and total degree, in
    /// ascending graded-lex order.
    pub fn all_of_degree(arity: usize, degree: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut current = vec![0u32; arity];
        fill_compositions(&mut current, 0, degree, &mut out);
        // Compositions are produced with the first slot ascending.
        out.sort();
        out
    }
}

fn fill_compositions(current: &mut Vec<u32>, slot: usize, remaining: u32, out: &mut Vec<Monomial>) {
    if slot + 1 == current.len() {
        current[slot] = remaining;
        out.push(Monomial(current.clone()));
        return;
    }
    if current.is_empty() {
        if remaining == 0 {
            out.push(Monomial(Vec::new()));
        }
        return;
    }
    for e in 0..=remaining {
        current[slot] = e;
        fill_compositions(current, slot + 1, remaining - e, out);
    }
    current[slot] = 0;
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grlex_orders_by_degree_first() {
        let a = Monomial::new(vec![0, 2]);
        let b = Monomial::new(vec![3, 0]);
        let c = Monomial::new(vec![1, 1]);
        assert!(a < b);
        assert!(a < c);
    }

    #[test]
    fn degree_basis_sizes() {
        assert_eq!(Monomial::all_of_degree(10, 4).len(), 715);
        assert_eq!(Monomial::all_of_degree(10, 6).len(), 5005);
        assert_eq!(Monomial::all_of_degree(3, 0).len(), 1);
        let basis = Monomial::all_of_degree(3, 3);
        assert!(basis.windows(2).all(|w| w[0] < w[1]));
    }
}
