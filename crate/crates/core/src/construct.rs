//! Deterministic builders for orthogonal arrays, optimum mixed covering
//! arrays and the compositions that turn them into detecting arrays.

use crate::array::{MixedArray, TypeVector};
use crate::error::{Error, Result};
use crate::verify::{coverage_index, coverage_range};

/// Index-1 `OA(t, t+1, v)`: every `x` in `Z_v^t` followed by `sum(x) mod v`.
pub fn oa_sum(t: usize, v: u32) -> Result<MixedArray> {
    if t == 0 {
        return Err(Error::InvalidStrength {
            t,
            constraint: "t >= 1".into(),
        });
    }
    if v < 2 {
        return Err(Error::InvalidTypes(format!("alphabet size {v} < 2")));
    }
    let base = MixedArray::full_factorial(TypeVector::new(vec![v; t])?);
    let mut data = Vec::with_capacity(base.n() * (t + 1));
    for row in base.rows() {
        data.extend_from_slice(row);
        data.push(row.iter().sum::<u32>() % v);
    }
    MixedArray::from_flat(TypeVector::new(vec![v; t + 1])?, data)
}

fn is_prime(q: u32) -> bool {
    q >= 2
        && (2..)
            .take_while(|i| i * i <= q)
            .all(|i| !q.is_multiple_of(i))
}

/// Bush's construction over the prime field `Z_q`: one row per polynomial
/// of degree `< t`, evaluated at the `q` field points, plus a column holding
/// the coefficient of `x^(t-1)`. The result is an index-1 `OA(t, q+1, q)`.
pub fn oa_bush(t: usize, q: u32) -> Result<MixedArray> {
    if !is_prime(q) {
        return Err(Error::Unsupported(format!(
            "order {q} is not prime; only prime fields are implemented"
        )));
    }
    if t == 0 || t > q as usize {
        return Err(Error::InvalidStrength {
            t,
            constraint: format!("1 <= t <= q = {q}"),
        });
    }
    let qq = u64::from(q);
    let coeffs = MixedArray::full_factorial(TypeVector::new(vec![q; t])?);
    let mut data = Vec::with_capacity(coeffs.n() * (q as usize + 1));
    for c in coeffs.rows() {
        // c[0] is the leading coefficient; Horner from there.
        for x in 0..qq {
            let value = c.iter().fold(0u64, |acc, &a| (acc * x + u64::from(a)) % qq);
            data.push(value as u32);
        }
        data.push(c[0]);
    }
    MixedArray::from_flat(TypeVector::new(vec![q; q as usize + 1])?, data)
}

/// Optimum index-1 `MCA(N; t, t+1, types)` with `N` the product of the `t`
/// largest sizes. The first column of smallest size holds the sum of the
/// other levels modulo its size; the other columns run a full factorial.
pub fn mca_optimum(t: usize, types: &TypeVector) -> Result<MixedArray> {
    if types.k() != t + 1 {
        return Err(Error::Precondition(format!(
            "need k = t+1 columns, got k = {} for t = {t}",
            types.k()
        )));
    }
    if t == 0 {
        return Err(Error::InvalidStrength {
            t,
            constraint: "t >= 1".into(),
        });
    }
    types.require_nontrivial()?;
    let sizes = types.sizes();
    let sum_col = (0..sizes.len())
        .min_by_key(|&j| (sizes[j], j))
        .expect("k >= 2");
    let others: Vec<u32> = sizes
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != sum_col)
        .map(|(_, &v)| v)
        .collect();
    let base = MixedArray::full_factorial(TypeVector::new(others)?);
    let modulus = sizes[sum_col];
    let mut data = Vec::with_capacity(base.n() * types.k());
    for row in base.rows() {
        let s = row.iter().sum::<u32>() % modulus;
        data.extend_from_slice(&row[..sum_col]);
        data.push(s);
        data.extend_from_slice(&row[sum_col..]);
    }
    MixedArray::from_flat(types.clone(), data)
}

/// Widens column `column` of a strength-`t` covering array `a` by `extra`
/// levels. `b` must be a strength-`(t-1)` covering array on `a`'s type with
/// that column removed; it is appended once per new level with the column
/// reinstated as a constant. The result has `N + extra * N'` rows.
pub fn insert_expand(
    a: &MixedArray,
    b: &MixedArray,
    column: usize,
    extra: u32,
) -> Result<MixedArray> {
    if extra == 0 {
        return Err(Error::Precondition(
            "the number of new levels must be >= 1".into(),
        ));
    }
    let k = a.k();
    if column >= k {
        return Err(Error::ColumnOutOfRange {
            column: column + 1,
            k,
        });
    }
    let mut reduced = a.types().sizes().to_vec();
    let widened = reduced.remove(column);
    if b.types().sizes() != reduced.as_slice() {
        return Err(Error::Precondition(format!(
            "second array has type {}, expected ({}) after removing column {}",
            b.types(),
            reduced
                .iter()
                .map(u32::to_string)
                .collect::<Vec<_>>()
                .join(","),
            column + 1
        )));
    }
    let t = infer_strength(a)?;
    if t >= 2 && coverage_index(b, t - 1)? == 0 {
        return Err(Error::Precondition(format!(
            "second array does not cover all {}-tuples",
            t - 1
        )));
    }
    let mut sizes = a.types().sizes().to_vec();
    sizes[column] = widened + extra;
    let mut out: Vec<u32> = a.rows().flatten().copied().collect();
    for r in 1..=extra {
        let level = widened - 1 + r;
        for row in b.rows() {
            out.extend_from_slice(&row[..column]);
            out.push(level);
            out.extend_from_slice(&row[column..]);
        }
    }
    MixedArray::from_flat(TypeVector::new(sizes)?, out)
}

/// Largest `t` at which `a` covers every tuple (at least 1).
fn infer_strength(a: &MixedArray) -> Result<usize> {
    let mut t = 0;
    while t < a.k() && coverage_index(a, t + 1)? > 0 {
        t += 1;
    }
    if t == 0 {
        return Err(Error::Precondition(
            "first array does not cover every level of every column".into(),
        ));
    }
    Ok(t)
}

/// Encodes a pair of levels `(a, b)` with `b < inner` as one level.
pub fn pair_level(a: u32, b: u32, inner: u32) -> u32 {
    a * inner + b
}

/// Kronecker product: row `(i, r)` is row `i` of `a` paired column-wise
/// with row `r` of `b`, each pair flattened by [`pair_level`]. Column `j`
/// of the result has `v_j * u_j` levels.
pub fn kronecker(a: &MixedArray, b: &MixedArray) -> Result<MixedArray> {
    if a.k() != b.k() {
        return Err(Error::InvalidShape(format!(
            "column counts differ: {} vs {}",
            a.k(),
            b.k()
        )));
    }
    let inner = b.types().sizes();
    let sizes: Vec<u32> = a
        .types()
        .sizes()
        .iter()
        .zip(inner)
        .map(|(v, u)| v * u)
        .collect();
    let mut data = Vec::with_capacity(a.n() * b.n() * a.k());
    for ra in a.rows() {
        for rb in b.rows() {
            data.extend(
                ra.iter()
                    .zip(rb)
                    .zip(inner)
                    .map(|((&x, &y), &u)| pair_level(x, y, u)),
            );
        }
    }
    MixedArray::from_flat(TypeVector::new(sizes)?, data)
}

/// Stacks `copies` shifted versions of an optimum index-1 `MCA` with
/// `k = t+1`: copy `i` adds `i` (mod `v`) to the first column of smallest
/// size. The result is a super-simple `MCA_copies` of `copies * N` rows,
/// hence an optimum `(copies-1, t)`-detecting array when `copies >= 2`.
pub fn replicate_cyclic(a: &MixedArray, copies: usize) -> Result<MixedArray> {
    let k = a.k();
    if k < 2 {
        return Err(Error::Precondition("need at least two columns".into()));
    }
    let t = k - 1;
    let sizes = a.types().sizes();
    let shift_col = (0..k).min_by_key(|&j| (sizes[j], j)).expect("k >= 2");
    let v1 = sizes[shift_col] as usize;
    if copies == 0 || copies > v1 {
        return Err(Error::Infeasible(format!(
            "{copies} cyclic copies need 1 <= copies <= smallest alphabet ({v1}); \
             an optimum k = t+1 detecting array of this size exists only then"
        )));
    }
    if a.n() as u128 != a.types().top_product(t) || coverage_index(a, t)? != 1 {
        return Err(Error::Precondition(format!(
            "input must be an index-1 MCA of strength {t} with {} rows",
            a.types().top_product(t)
        )));
    }
    let mut out = a.clone();
    for shift in 1..copies {
        let mut copy = a.clone();
        for r in 0..copy.n() {
            let level = (copy.get(r, shift_col) + shift as u32) % v1 as u32;
            copy.set(r, shift_col, level);
        }
        out = out.stack(&copy)?;
    }
    Ok(out)
}

/// From an index-1 `OA(t+1, k+1, m)`, keeps the rows whose last column is
/// below `lambda` and drops that column: a super-simple `OA_lambda(t, k, m)`.
pub fn derive_super_simple(a: &MixedArray, lambda: u32) -> Result<MixedArray> {
    let k1 = a.k();
    let m = a.types().size(0);
    if a.types().sizes().iter().any(|&v| v != m) || k1 < 2 {
        return Err(Error::Precondition(
            "input must be a fixed-level array with at least two columns".into(),
        ));
    }
    if lambda < 2 || lambda > m {
        return Err(Error::Infeasible(format!(
            "lambda = {lambda} outside 2 <= lambda <= m = {m}"
        )));
    }
    // N = m^(t+1) fixes the strength of an index-1 OA.
    let mut strength = 0usize;
    let mut size = 1usize;
    while size < a.n() {
        size *= m as usize;
        strength += 1;
    }
    if size != a.n() || strength < 2 || strength >= k1 || coverage_range(a, strength)? != (1, 1) {
        return Err(Error::Precondition(format!(
            "input with {} rows is not an index-1 orthogonal array of strength >= 2",
            a.n()
        )));
    }
    let last = k1 - 1;
    let data: Vec<u32> = a
        .rows()
        .filter(|row| row[last] < lambda)
        .flat_map(|row| row[..last].iter().copied())
        .collect();
    MixedArray::from_flat(TypeVector::new(vec![m; last])?, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::is_super_simple;

    fn types(v: &[u32]) -> TypeVector {
        TypeVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn sum_oa_shapes() {
        let a = oa_sum(2, 3).unwrap();
        assert_eq!((a.n(), a.k()), (9, 3));
        assert_eq!(coverage_range(&a, 2).unwrap(), (1, 1));
        let b = oa_sum(3, 2).unwrap();
        assert_eq!((b.n(), b.k()), (8, 4));
        assert_eq!(coverage_range(&b, 3).unwrap(), (1, 1));
    }

    #[test]
    fn bush_oa() {
        let a = oa_bush(2, 3).unwrap();
        assert_eq!((a.n(), a.k()), (9, 4));
        assert_eq!(coverage_range(&a, 2).unwrap(), (1, 1));
        let b = oa_bush(3, 5).unwrap();
        assert_eq!((b.n(), b.k()), (125, 6));
        assert_eq!(coverage_range(&b, 3).unwrap(), (1, 1));
        assert!(matches!(oa_bush(2, 4), Err(Error::Unsupported(_))));
        assert!(oa_bush(4, 3).is_err());
    }

    #[test]
    fn optimum_mca_sizes() {
        let a = mca_optimum(2, &types(&[2, 3, 3])).unwrap();
        assert_eq!(a.n(), 9);
        assert_eq!(coverage_index(&a, 2).unwrap(), 1);
        let b = mca_optimum(3, &types(&[2, 3, 3, 4])).unwrap();
        assert_eq!(b.n(), 36);
        assert_eq!(coverage_index(&b, 3).unwrap(), 1);
        let c = mca_optimum(2, &types(&[2, 2, 2])).unwrap();
        assert_eq!(coverage_range(&c, 2).unwrap(), (1, 1));
        // column order is kept even when the smallest column is not first
        let d = mca_optimum(2, &types(&[4, 3, 3])).unwrap();
        assert_eq!(d.types().sizes(), &[4, 3, 3]);
        assert_eq!(d.n(), 12);
        assert_eq!(coverage_index(&d, 2).unwrap(), 1);
        assert!(mca_optimum(2, &types(&[2, 3, 3, 3])).is_err());
    }

    fn strength_one_23() -> MixedArray {
        MixedArray::new(types(&[2, 3]), vec![vec![0, 0], vec![1, 1], vec![0, 2]]).unwrap()
    }

    #[test]
    fn insert_expand_widens_column() {
        let a = mca_optimum(2, &types(&[2, 3, 3])).unwrap();
        let b = strength_one_23();
        let e1 = insert_expand(&a, &b, 2, 1).unwrap();
        assert_eq!(e1.types().sizes(), &[2, 3, 4]);
        assert_eq!(e1.n(), 12);
        assert!(coverage_index(&e1, 2).unwrap() >= 1);
        let e2 = insert_expand(&a, &b, 2, 2).unwrap();
        assert_eq!(e2.types().sizes(), &[2, 3, 5]);
        assert_eq!(e2.n(), 15);
        assert!(coverage_index(&e2, 2).unwrap() >= 1);
    }

    #[test]
    fn insert_expand_guards() {
        let a = mca_optimum(2, &types(&[2, 3, 3])).unwrap();
        let wrong = MixedArray::full_factorial(types(&[3, 3]));
        assert!(matches!(
            insert_expand(&a, &wrong, 2, 1),
            Err(Error::Precondition(_))
        ));
        assert!(insert_expand(&a, &strength_one_23(), 2, 0).is_err());
    }

    #[test]
    fn pair_encoding() {
        assert_eq!(pair_level(1, 2, 3), 5);
    }

    #[test]
    fn kronecker_of_small_oas() {
        let a = oa_sum(2, 2).unwrap();
        let c = kronecker(&a, &a).unwrap();
        assert_eq!((c.n(), c.k()), (16, 3));
        assert_eq!(c.types().sizes(), &[4, 4, 4]);
        assert_eq!(coverage_index(&c, 2).unwrap(), 1);
        assert!(kronecker(&a, &oa_sum(3, 2).unwrap()).is_err());
    }

    #[test]
    fn replicate_bounds() {
        let a = mca_optimum(2, &types(&[2, 3, 3])).unwrap();
        assert_eq!(replicate_cyclic(&a, 1).unwrap(), a);
        let r = replicate_cyclic(&a, 2).unwrap();
        assert_eq!(r.n(), 18);
        assert!(is_super_simple(&r, 2).unwrap().holds);
        assert_eq!(coverage_index(&r, 2).unwrap(), 2);
        assert!(matches!(replicate_cyclic(&a, 3), Err(Error::Infeasible(_))));
    }

    #[test]
    fn derive_guards() {
        assert!(matches!(
            derive_super_simple(&oa_sum(3, 2).unwrap(), 1),
            Err(Error::Infeasible(_))
        ));
        let stacked = oa_sum(2, 3).unwrap().stack(&oa_sum(2, 3).unwrap()).unwrap();
        assert!(derive_super_simple(&stacked, 2).is_err());
    }
}
