//! Extensions of an agent's object order to allocation vectors: stochastic
//! dominance (SD, partial) and downward lexicographic (DL, total).
//!
//! An allocation vector is one row of a random assignment, indexed by object.
//! An order is a list of object indices, most preferred first.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SdVerdict {
    Equal,
    FirstStrictlyDominates,
    SecondStrictlyDominates,
    Incomparable,
}

impl SdVerdict {
    /// The first vector weakly SD-dominates the second.
    pub fn first_weakly_dominates(self) -> bool {
        matches!(self, SdVerdict::Equal | SdVerdict::FirstStrictlyDominates)
    }

    pub fn second_weakly_dominates(self) -> bool {
        matches!(self, SdVerdict::Equal | SdVerdict::SecondStrictlyDominates)
    }

    pub fn mirror(self) -> Self {
        match self {
            SdVerdict::FirstStrictlyDominates => SdVerdict::SecondStrictlyDominates,
            SdVerdict::SecondStrictlyDominates => SdVerdict::FirstStrictlyDominates,
            v => v,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum DlVerdict {
    First,
    Second,
    Equal,
}

/// Sum of `a` over every object weakly preferred to `o` under `order`.
pub fn upper_contour_sum(a: &[Rational], order: &[usize], o: usize) -> Result<Rational> {
    let pos = order
        .iter()
        .position(|&x| x == o)
        .ok_or_else(|| Error::UnknownObject(format!("object index {o}")))?;
    Ok(order[..=pos].iter().map(|&x| &a[x]).sum())
}

/// All upper-contour sums, in preference order.
pub fn prefix_sums(a: &[Rational], order: &[usize]) -> Vec<Rational> {
    let mut acc = Rational::zero();
    order
        .iter()
        .map(|&o| {
            acc += &a[o];
            acc.clone()
        })
        .collect()
}

fn check_lengths(a: &[Rational], b: &[Rational], order: &[usize]) {
    assert!(
        a.len() == b.len() && a.len() == order.len(),
        "allocation vectors and order must cover the same objects"
    );
}

pub fn sd_compare(a: &[Rational], b: &[Rational], order: &[usize]) -> SdVerdict {
    check_lengths(a, b, order);
    let mut a_ahead = false;
    let mut b_ahead = false;
    let mut sum_a = Rational::zero();
    let mut sum_b = Rational::zero();
    for &o in order {
        sum_a += &a[o];
        sum_b += &b[o];
        match sum_a.cmp(&sum_b) {
            std::cmp::Ordering::Greater => a_ahead = true,
            std::cmp::Ordering::Less => b_ahead = true,
            std::cmp::Ordering::Equal => {}
        }
        if a_ahead && b_ahead {
            return SdVerdict::Incomparable;
        }
    }
    match (a_ahead, b_ahead) {
        (false, false) => SdVerdict::Equal,
        (true, false) => SdVerdict::FirstStrictlyDominates,
        (false, true) => SdVerdict::SecondStrictlyDominates,
        (true, true) => unreachable!(),
    }
}

/// `a` weakly SD-dominates `b`.
pub fn sd_weakly_prefers(a: &[Rational], b: &[Rational], order: &[usize]) -> bool {
    sd_compare(a, b, order).first_weakly_dominates()
}

pub fn sd_strictly_prefers(a: &[Rational], b: &[Rational], order: &[usize]) -> bool {
    sd_compare(a, b, order) == SdVerdict::FirstStrictlyDominates
}

pub fn dl_compare(a: &[Rational], b: &[Rational], order: &[usize]) -> DlVerdict {
    check_lengths(a, b, order);
    for &o in order {
        match a[o].cmp(&b[o]) {
            std::cmp::Ordering::Greater => return DlVerdict::First,
            std::cmp::Ordering::Less => return DlVerdict::Second,
            std::cmp::Ordering::Equal => {}
        }
    }
    DlVerdict::Equal
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn v(xs: &[(i64, i64)]) -> Vec<Rational> {
        xs.iter().map(|&(p, q)| rat(p, q)).collect()
    }

    const ORDER: [usize; 4] = [0, 1, 2, 3];

    #[test]
    fn upper_contour_sums() {
        let a = v(&[(1, 1), (0, 1), (1, 2), (1, 2)]);
        assert_eq!(upper_contour_sum(&a, &ORDER, 1).unwrap(), rat(1, 1));
        assert_eq!(upper_contour_sum(&a, &ORDER, 2).unwrap(), rat(3, 2));
        assert_eq!(upper_contour_sum(&a, &ORDER, 3).unwrap(), rat(2, 1));
        assert!(upper_contour_sum(&a, &ORDER, 7).is_err());
    }

    #[test]
    fn example_rows_sd_and_dl() {
        let a = v(&[(1, 1), (0, 1), (1, 2), (1, 2)]);
        let b = v(&[(0, 1), (1, 1), (1, 2), (1, 2)]);
        assert_eq!(sd_compare(&a, &b, &ORDER), SdVerdict::FirstStrictlyDominates);
        assert_eq!(sd_compare(&b, &a, &ORDER), SdVerdict::SecondStrictlyDominates);
        assert_eq!(dl_compare(&a, &b, &ORDER), DlVerdict::First);
        assert_eq!(sd_compare(&a, &a, &ORDER), SdVerdict::Equal);
        assert_eq!(dl_compare(&a, &a, &ORDER), DlVerdict::Equal);
    }

    #[test]
    fn incomparable_rows() {
        // Prefix sums 1,1,1,2 against 0,1,2,2.
        let a = v(&[(1, 1), (0, 1), (0, 1), (1, 1)]);
        let b = v(&[(0, 1), (1, 1), (1, 1), (0, 1)]);
        assert_eq!(sd_compare(&a, &b, &ORDER), SdVerdict::Incomparable);
        assert_eq!(dl_compare(&a, &b, &ORDER), DlVerdict::First);
    }

    #[test]
    fn order_matters() {
        let a = v(&[(1, 1), (0, 1)]);
        let b = v(&[(0, 1), (1, 1)]);
        assert_eq!(sd_compare(&a, &b, &[1, 0]), SdVerdict::SecondStrictlyDominates);
        assert_eq!(dl_compare(&a, &b, &[1, 0]), DlVerdict::Second);
    }
}
