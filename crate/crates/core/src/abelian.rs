//! Abelianized relator matrix and its exact determinant.
//!
//! The absolute value of this determinant is conserved by every
//! Andrews-Curtis move, which makes `|det| = 1` a necessary condition for
//! trivializability and a cheap short-circuit before any search runs.
//!
//! The determinant uses Bareiss fraction-free elimination over `i128` with
//! checked arithmetic; on overflow the computation is redone in arbitrary
//! precision, so the result is always exact.

use num_bigint::BigInt;

use crate::presentation::Presentation;

/// Square integer matrix whose row `i` is the exponent vector of relator `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianMatrix {
    n: usize,
    rows: Vec<Vec<i64>>,
}

impl AbelianMatrix {
    pub fn from_presentation(p: &Presentation) -> AbelianMatrix {
        let n = p.rank() as usize;
        let rows = p
            .relators()
            .iter()
            .map(|r| {
                r.exponent_vector(p.rank())
                    .expect("relators are validated against rank")
            })
            .collect();
        AbelianMatrix { n, rows }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, row: usize, col: usize) -> i64 {
        self.rows[row][col]
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    /// Exact determinant. The empty matrix has determinant 1.
    pub fn determinant(&self) -> BigInt {
        match bareiss_i128(&self.rows) {
            Some(det) => BigInt::from(det),
            None => bareiss_bigint(&self.rows),
        }
    }
}

/// Fraction-free elimination; division steps are exact by construction.
/// Returns `None` if any intermediate product overflows `i128`.
fn bareiss_i128(rows: &[Vec<i64>]) -> Option<i128> {
    let n = rows.len();
    if n == 0 {
        return Some(1);
    }
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| v as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let Some(pivot) = (k + 1..n).find(|&r| m[r][k] != 0) else {
                return Some(0);
            };
            m.swap(k, pivot);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let a = m[i][j].checked_mul(m[k][k])?;
                let b = m[i][k].checked_mul(m[k][j])?;
                m[i][j] = a.checked_sub(b)? / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    Some(sign * m[n - 1][n - 1])
}

fn bareiss_bigint(rows: &[Vec<i64>]) -> BigInt {
    let n = rows.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let mut negate = false;
    let mut prev = BigInt::from(1);
    let zero = BigInt::from(0);
    for k in 0..n - 1 {
        if m[k][k] == zero {
            let Some(pivot) = (k + 1..n).find(|&r| m[r][k] != zero) else {
                return zero;
            };
            m.swap(k, pivot);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
            }
            m[i][k] = zero.clone();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn mat(rows: Vec<Vec<i64>>) -> AbelianMatrix {
        let n = rows.len();
        AbelianMatrix { n, rows }
    }

    /// Oracle: cofactor expansion, exponential but obviously correct.
    fn naive_det(rows: &[Vec<i64>]) -> i128 {
        let n = rows.len();
        if n == 0 {
            return 1;
        }
        if n == 1 {
            return rows[0][0] as i128;
        }
        let mut acc = 0i128;
        for (col, &lead) in rows[0].iter().enumerate() {
            if lead == 0 {
                continue;
            }
            let minor: Vec<Vec<i64>> = rows[1..]
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(j, _)| j != col)
                        .map(|(_, &v)| v)
                        .collect()
                })
                .collect();
            let term = lead as i128 * naive_det(&minor);
            if col % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    #[test]
    fn presentation_examples() {
        let p = Presentation::parse("xy;y").unwrap();
        let m = AbelianMatrix::from_presentation(&p);
        assert_eq!(m.rows(), &[vec![1, 1], vec![0, 1]]);
        assert_eq!(m.determinant(), BigInt::from(1));

        let p = Presentation::parse("xx;y").unwrap();
        assert_eq!(
            AbelianMatrix::from_presentation(&p).determinant(),
            BigInt::from(2)
        );

        let p = Presentation::trivial(0);
        assert_eq!(
            AbelianMatrix::from_presentation(&p).determinant(),
            BigInt::from(1)
        );
    }

    #[test]
    fn matches_cofactor_oracle() {
        let mut rng = SplitMix64::new(21);
        for _ in 0..300 {
            let n = rng.range(1, 5) as usize;
            let rows: Vec<Vec<i64>> = (0..n)
                .map(|_| (0..n).map(|_| rng.range(0, 12) as i64 - 6).collect())
                .collect();
            assert_eq!(
                mat(rows.clone()).determinant(),
                BigInt::from(naive_det(&rows)),
                "rows {rows:?}"
            );
        }
    }

    #[test]
    fn singular_matrix() {
        assert_eq!(
            mat(vec![vec![2, 4], vec![1, 2]]).determinant(),
            BigInt::from(0)
        );
        assert_eq!(
            mat(vec![vec![0, 0], vec![1, 2]]).determinant(),
            BigInt::from(0)
        );
    }

    #[test]
    fn bigint_escalation_agrees() {
        // Entries big enough that Bareiss on i128 overflows partway.
        let big = 3_000_000_000_000_000_000i64;
        let rows = vec![
            vec![big, 1, 0, 0, 1],
            vec![1, big, 1, 0, 0],
            vec![0, 1, big, 1, 0],
            vec![0, 0, 1, big, 1],
            vec![1, 0, 0, 1, big],
        ];
        assert!(bareiss_i128(&rows).is_none());
        let det = mat(rows.clone()).determinant();
        assert_eq!(det, bareiss_bigint(&rows));
        // Leading term is big^5; make sure magnitude is in the right range.
        assert!(det > BigInt::from(big).pow(4));
    }
}
