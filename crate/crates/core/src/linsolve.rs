//! Exact sparse linear solving over ℚ.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

pub type SparseRow = BTreeMap<usize, BigRational>;

/// A particular solution of `rows · x = rhs` with free variables set to 0,
/// or `None` when inconsistent.
pub fn solve(equations: Vec<(SparseRow, BigRational)>, ncols: usize) -> Option<Vec<BigRational>> {
    // pivot column -> (row with leading entry 1 at that column, rhs)
    let mut pivots: BTreeMap<usize, (SparseRow, BigRational)> = BTreeMap::new();
    for (mut row, mut rhs) in equations {
        row.retain(|_, v| !v.is_zero());
        let mut cursor = 0;
        while let Some((&col, _)) = row.range(cursor..).find(|(c, _)| pivots.contains_key(c)) {
            let factor = row.remove(&col).expect("present");
            let (prow, prhs) = &pivots[&col];
            for (c, v) in prow.iter().filter(|(c, _)| **c != col) {
                let entry = row.entry(*c).or_insert_with(BigRational::zero);
                *entry -= &factor * v;
                if entry.is_zero() {
                    row.remove(c);
                }
            }
            rhs -= &factor * prhs;
            cursor = col + 1;
        }
        match row.iter().next() {
            None if rhs.is_zero() => {}
            None => return None,
            Some((&lead, lead_val)) => {
                let inv = lead_val.recip();
                for v in row.values_mut() {
                    *v *= &inv;
                }
                rhs *= &inv;
                pivots.insert(lead, (row, rhs));
            }
        }
    }
    let mut x = vec![BigRational::zero(); ncols];
    for (&col, (row, rhs)) in pivots.iter().rev() {
        let mut value = rhs.clone();
        for (c, v) in row.iter().filter(|(c, _)| **c != col) {
            value -= v * &x[*c];
        }
        x[col] = value;
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn row(entries: &[(usize, i64)]) -> SparseRow {
        entries.iter().map(|&(c, v)| (c, q(v))).collect()
    }

    #[test]
    fn solves_square_system() {
        // x + y = 3, x - y = 1
        let x = solve(vec![(row(&[(0, 1), (1, 1)]), q(3)), (row(&[(0, 1), (1, -1)]), q(1))], 2).unwrap();
        assert_eq!(x, vec![q(2), q(1)]);
    }

    #[test]
    fn underdetermined_and_inconsistent() {
        let x = solve(vec![(row(&[(0, 2), (2, 4)]), q(2))], 3).unwrap();
        assert_eq!(&q(2) * &x[0] + &q(4) * &x[2], q(2));
        assert!(solve(vec![(row(&[(0, 1)]), q(1)), (row(&[(0, 2)]), q(3))], 1).is_none());
        assert!(solve(vec![(row(&[]), q(1))], 1).is_none());
    }

    #[test]
    fn later_pivots_feed_back_substitution() {
        // y + z = 2 ; x + 2y = 5 ; z = 1  ->  (3, 1, 1)
        let x = solve(
            vec![
                (row(&[(1, 1), (2, 1)]), q(2)),
                (row(&[(0, 1), (1, 2)]), q(5)),
                (row(&[(2, 1)]), q(1)),
            ],
            3,
        )
        .unwrap();
        assert_eq!(x, vec![q(3), q(1), q(1)]);
    }
}
