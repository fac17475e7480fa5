//! Dense m-dimensional matrices and their full signed determinant.
//!
//! The determinant of a cube `a` of order `N^m` is
//!
//! ```text
//! det a = Σ_{τ₂,…,τ_m ∈ S_N} σ(τ₂)⋯σ(τ_m) Π_i a[i, τ₂(i), …, τ_m(i)]
//! ```
//!
//! For `m = 2` this is the ordinary determinant and for `m = 1` it is the
//! product of the entries.

mod json;

pub use json::{AnyMatrix, ScalarKind};

use crate::error::{Error, Result};
use crate::multiindex::{factorial, sigma, signed_permutations, MultiIndex, Sign};
use crate::parallel::{map_chunks, Workers};
use crate::scalar::Scalar;

/// Default cap on the number of product terms a determinant may visit.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Knobs for the determinant kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetOptions {
    pub budget: u128,
    pub workers: Workers,
}

impl Default for DetOptions {
    fn default() -> Self {
        DetOptions {
            budget: DEFAULT_BUDGET,
            workers: Workers::single(),
        }
    }
}

impl DetOptions {
    pub fn with_workers(mut self, workers: Workers) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_budget(mut self, budget: u128) -> Self {
        self.budget = budget;
        self
    }
}

/// m-dimensional matrix with row-major storage (last index fastest).
///
/// Public indices are 1-based. A matrix with no directions holds a single
/// scalar; it only arises as the layer of a vector.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperMatrix<T> {
    orders: Vec<usize>,
    entries: Vec<T>,
}

impl<T: Scalar> HyperMatrix<T> {
    pub fn new(orders: Vec<usize>, entries: Vec<T>) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::domain("a hypermatrix needs at least one direction"));
        }
        if orders.contains(&0) {
            return Err(Error::domain(format!("orders {orders:?} must be positive")));
        }
        let count: usize = orders.iter().product();
        if count != entries.len() {
            return Err(Error::domain(format!(
                "orders {orders:?} need {count} entries, got {}",
                entries.len()
            )));
        }
        Ok(HyperMatrix { orders, entries })
    }

    pub fn scalar(value: T) -> Self {
        HyperMatrix {
            orders: Vec::new(),
            entries: vec![value],
        }
    }

    pub fn zeros(orders: Vec<usize>) -> Result<Self> {
        let count = orders.iter().product();
        HyperMatrix::new(orders, vec![T::zero(); count])
    }

    /// Builds a matrix from a function of the 1-based index.
    pub fn from_fn(orders: Vec<usize>, mut f: impl FnMut(&[usize]) -> T) -> Result<Self> {
        let count: usize = orders.iter().product();
        let mut entries = Vec::with_capacity(count);
        let mut index = vec![1; orders.len()];
        for _ in 0..count {
            entries.push(f(&index));
            for d in (0..orders.len()).rev() {
                if index[d] < orders[d] {
                    index[d] += 1;
                    break;
                }
                index[d] = 1;
            }
        }
        HyperMatrix::new(orders, entries)
    }

    /// Ordinary matrix from rows.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::domain("ragged rows"));
        }
        HyperMatrix::new(vec![n, cols], rows.into_iter().flatten().collect())
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    pub fn dims(&self) -> usize {
        self.orders.len()
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    /// Common order when every direction has the same length.
    pub fn cube_order(&self) -> Option<usize> {
        let first = *self.orders.first()?;
        self.orders.iter().all(|&o| o == first).then_some(first)
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.orders.len()];
        for d in (0..self.orders.len().saturating_sub(1)).rev() {
            strides[d] = strides[d + 1] * self.orders[d + 1];
        }
        strides
    }

    fn check_index(&self, index: &[usize]) -> Result<()> {
        if index.len() != self.dims() {
            return Err(Error::domain(format!(
                "index {index:?} has wrong length for orders {:?}",
                self.orders
            )));
        }
        for (d, (&i, &n)) in index.iter().zip(&self.orders).enumerate() {
            if i == 0 || i > n {
                return Err(Error::domain(format!(
                    "index {i} out of range 1..={n} in direction {}",
                    d + 1
                )));
            }
        }
        Ok(())
    }

    fn offset(&self, index: &[usize]) -> usize {
        let mut offset = 0;
        for (d, &i) in index.iter().enumerate() {
            offset = offset * self.orders[d] + (i - 1);
        }
        offset
    }

    /// Entry at a 1-based index.
    pub fn get(&self, index: &[usize]) -> Result<&T> {
        self.check_index(index)?;
        Ok(&self.entries[self.offset(index)])
    }

    /// The single value of a 0-dimensional matrix.
    pub fn as_scalar(&self) -> Option<&T> {
        self.orders.is_empty().then(|| &self.entries[0])
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> HyperMatrix<U> {
        HyperMatrix {
            orders: self.orders.clone(),
            entries: self.entries.iter().map(f).collect(),
        }
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        let mut best = T::zero();
        for e in &self.entries {
            let a = e.abs_value();
            if a > best {
                best = a;
            }
        }
        best
    }

    pub fn sub(&self, other: &HyperMatrix<T>) -> Result<HyperMatrix<T>> {
        if self.orders != other.orders {
            return Err(Error::domain(format!(
                "order mismatch {:?} vs {:?}",
                self.orders, other.orders
            )));
        }
        Ok(HyperMatrix {
            orders: self.orders.clone(),
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        })
    }

    fn check_direction(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.dims() {
            return Err(Error::domain(format!(
                "direction {i} outside 1..={}",
                self.dims()
            )));
        }
        Ok(())
    }

    fn check_slot(&self, i: usize, j: usize) -> Result<()> {
        if j == 0 || j > self.orders[i - 1] {
            return Err(Error::domain(format!(
                "slot {j} outside 1..={} in direction {i}",
                self.orders[i - 1]
            )));
        }
        Ok(())
    }

    /// The `j`-th layer in direction `i`: the slice with index `i` fixed to `j`.
    pub fn layer(&self, i: usize, j: usize) -> Result<HyperMatrix<T>> {
        self.check_direction(i)?;
        self.check_slot(i, j)?;
        let mut orders = self.orders.clone();
        orders.remove(i - 1);
        let mut full = vec![0; self.dims()];
        let entries = HyperMatrix::<T>::index_iter(&orders)
            .map(|rest| {
                let mut k = 0;
                for (d, slot) in full.iter_mut().enumerate() {
                    if d == i - 1 {
                        *slot = j;
                    } else {
                        *slot = rest[k];
                        k += 1;
                    }
                }
                self.entries[self.offset(&full)].clone()
            })
            .collect();
        Ok(HyperMatrix { orders, entries })
    }

    /// Swaps layers `j1` and `j2` in direction `i`.
    pub fn swap_layers(&self, i: usize, j1: usize, j2: usize) -> Result<HyperMatrix<T>> {
        self.check_direction(i)?;
        self.check_slot(i, j1)?;
        self.check_slot(i, j2)?;
        self.permute(|index| {
            let mut source = index.to_vec();
            if source[i - 1] == j1 {
                source[i - 1] = j2;
            } else if source[i - 1] == j2 {
                source[i - 1] = j1;
            }
            source
        })
    }

    /// Exchanges index directions `i` and `j`.
    pub fn transpose(&self, i: usize, j: usize) -> Result<HyperMatrix<T>> {
        self.check_direction(i)?;
        self.check_direction(j)?;
        if self.orders[i - 1] != self.orders[j - 1] {
            return Err(Error::domain(format!(
                "cannot transpose directions {i} and {j} of orders {} and {}",
                self.orders[i - 1],
                self.orders[j - 1]
            )));
        }
        self.permute(|index| {
            let mut source = index.to_vec();
            source.swap(i - 1, j - 1);
            source
        })
    }

    fn permute(&self, source_of: impl Fn(&[usize]) -> Vec<usize>) -> Result<HyperMatrix<T>> {
        let entries = HyperMatrix::<T>::index_iter(&self.orders)
            .map(|index| self.entries[self.offset(&source_of(&index))].clone())
            .collect();
        Ok(HyperMatrix {
            orders: self.orders.clone(),
            entries,
        })
    }

    /// 1-based indices in storage order.
    pub fn index_iter(orders: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
        let count: usize = orders.iter().product();
        let mut index = vec![1; orders.len()];
        (0..count).map(move |step| {
            if step > 0 {
                for d in (0..orders.len()).rev() {
                    if index[d] < orders[d] {
                        index[d] += 1;
                        break;
                    }
                    index[d] = 1;
                }
            }
            index.clone()
        })
    }

    fn require_cube(&self) -> Result<usize> {
        self.cube_order().ok_or_else(|| {
            Error::domain(format!(
                "determinant needs equal orders, got {:?}",
                self.orders
            ))
        })
    }

    /// Full signed determinant by direct enumeration of `(S_N)^{m-1}`.
    pub fn det_full(&self, options: &DetOptions) -> Result<T> {
        let n = self.require_cube()?;
        let m = self.dims();
        if m == 1 {
            return Ok(product(&self.entries));
        }
        check_budget(factorial(n), m - 1, options.budget)?;
        let perms = signed_permutations(n);
        let strides = self.strides();
        // offsets[i] accumulates the storage offset of row i along the chosen
        // permutations; the first direction contributes i itself.
        let base: Vec<usize> = (0..n).map(|i| i * strides[0]).collect();
        let parts = map_chunks(options.workers, perms.len(), |range| {
            let mut acc = T::zero();
            let mut offsets = base.clone();
            for (tau, sign) in &perms[range] {
                for i in 0..n {
                    offsets[i] = base[i] + tau[i] * strides[1];
                }
                self.full_recurse(&perms, &strides, 2, *sign, &mut offsets, &mut acc);
            }
            acc
        });
        Ok(sum_in_order(parts))
    }

    fn full_recurse(
        &self,
        perms: &[(Vec<usize>, Sign)],
        strides: &[usize],
        direction: usize,
        sign: Sign,
        offsets: &mut [usize],
        acc: &mut T,
    ) {
        if direction == self.dims() {
            let mut term = T::one();
            for &o in offsets.iter() {
                let e = &self.entries[o];
                if e.is_zero() {
                    return;
                }
                term = term * e.clone();
            }
            *acc = acc.clone() + sign.apply(term);
            return;
        }
        let saved: Vec<usize> = offsets.to_vec();
        for (tau, s) in perms {
            for (i, o) in offsets.iter_mut().enumerate() {
                *o = saved[i] + tau[i] * strides[direction];
            }
            self.full_recurse(perms, strides, direction + 1, sign * *s, offsets, acc);
        }
        offsets.copy_from_slice(&saved);
    }

    /// Same value as [`det_full`](Self::det_full), computed by fixing the
    /// second-direction permutation and recursing on the `(m-1)`-dimensional
    /// matrix `b[i, l₃, …] = a[i, τ₂(i), l₃, …]`. The two-dimensional base
    /// case is solved by elimination.
    pub fn det_layer_fold(&self, options: &DetOptions) -> Result<T> {
        let n = self.require_cube()?;
        let m = self.dims();
        match m {
            1 => return Ok(product(&self.entries)),
            2 => return Ok(self.ordinary_det_unchecked(n)),
            _ => {}
        }
        check_budget(factorial(n), m - 2, options.budget)?;
        let perms = signed_permutations(n);
        let parts = map_chunks(options.workers, perms.len(), |range| {
            let mut acc = T::zero();
            for (tau, sign) in &perms[range] {
                let folded = self.fold(tau);
                acc = acc + sign.apply(folded.fold_recurse(n, &perms));
            }
            acc
        });
        Ok(sum_in_order(parts))
    }

    fn fold_recurse(&self, n: usize, perms: &[(Vec<usize>, Sign)]) -> T {
        if self.dims() == 2 {
            return self.ordinary_det_unchecked(n);
        }
        let mut acc = T::zero();
        for (tau, sign) in perms {
            acc = acc + sign.apply(self.fold(tau).fold_recurse(n, perms));
        }
        acc
    }

    /// `b[i, rest] = a[i, tau(i), rest]`.
    fn fold(&self, tau: &[usize]) -> HyperMatrix<T> {
        let n = self.orders[0];
        let inner: usize = self.orders[2..].iter().product();
        let mut entries = Vec::with_capacity(n * inner);
        for (i, &t) in tau.iter().enumerate() {
            let start = (i * n + t) * inner;
            entries.extend_from_slice(&self.entries[start..start + inner]);
        }
        let mut orders = self.orders.clone();
        orders.remove(1);
        HyperMatrix { orders, entries }
    }

    /// Determinant of a square two-dimensional matrix.
    pub fn ordinary_det(&self) -> Result<T> {
        if self.dims() != 2 {
            return Err(Error::domain(format!(
                "ordinary determinant needs a 2-dimensional matrix, got {}",
                self.dims()
            )));
        }
        let n = self.require_cube()?;
        Ok(self.ordinary_det_unchecked(n))
    }

    fn ordinary_det_unchecked(&self, n: usize) -> T {
        let mut a = self.entries.clone();
        let mut det = T::one();
        for col in 0..n {
            let mut pivot = col;
            let mut best = a[col * n + col].abs_value();
            for row in col + 1..n {
                let v = a[row * n + col].abs_value();
                if v > best {
                    best = v;
                    pivot = row;
                }
            }
            if best.is_zero() {
                return T::zero();
            }
            if pivot != col {
                for k in 0..n {
                    a.swap(col * n + k, pivot * n + k);
                }
                det = -det;
            }
            let p = a[col * n + col].clone();
            det = det * p.clone();
            for row in col + 1..n {
                let factor = a[row * n + col].clone() / p.clone();
                if factor.is_zero() {
                    continue;
                }
                for k in col + 1..n {
                    let v = a[row * n + k].clone() - factor.clone() * a[col * n + k].clone();
                    a[row * n + k] = v;
                }
            }
        }
        det
    }

    /// The sub-cube picked out by `spec`, before its sign is applied.
    pub fn minor(&self, spec: &MinorSpec) -> Result<HyperMatrix<T>> {
        spec.check_fits(self.orders())?;
        let r = spec.degree();
        let orders = vec![r; self.dims()];
        let mut full = vec![0; self.dims()];
        let entries = HyperMatrix::<T>::index_iter(&orders)
            .map(|local| {
                for (d, slot) in full.iter_mut().enumerate() {
                    *slot = spec.selectors[d].entries()[local[d] - 1];
                }
                self.entries[self.offset(&full)].clone()
            })
            .collect();
        Ok(HyperMatrix { orders, entries })
    }

    /// Signed determinant of the minor; degree 0 gives 1.
    pub fn minor_det(&self, spec: &MinorSpec, options: &DetOptions) -> Result<T> {
        spec.check_fits(self.orders())?;
        if spec.degree() == 0 {
            return Ok(T::one());
        }
        let det = self.minor(spec)?.det_full(options)?;
        Ok(spec.sign().apply(det))
    }
}

fn product<T: Scalar>(values: &[T]) -> T {
    values.iter().fold(T::one(), |acc, v| acc * v.clone())
}

fn sum_in_order<T: Scalar>(parts: Vec<T>) -> T {
    parts.into_iter().fold(T::zero(), |acc, v| acc + v)
}

fn check_budget(per_group: u128, groups: usize, budget: u128) -> Result<()> {
    let mut required: u128 = 1;
    for _ in 0..groups {
        required = required.saturating_mul(per_group);
    }
    if required > budget {
        return Err(Error::Budget { required, budget });
    }
    Ok(())
}

/// Selector of a minor: one multi-index per direction, all of degree `r`.
///
/// For a hyper-Jacobian the first selector picks components (`β`) and the
/// rest pick derivative directions (`α¹ … α^m`). A spec built from
/// unsorted selectors remembers the sign of sorting them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinorSpec {
    selectors: Vec<MultiIndex>,
    sign: Sign,
    degree: usize,
}

impl MinorSpec {
    pub fn new(selectors: Vec<MultiIndex>) -> Result<Self> {
        let degree = selectors
            .first()
            .map(MultiIndex::len)
            .ok_or_else(|| Error::domain("a minor needs at least one selector"))?;
        if selectors.iter().any(|s| s.len() != degree) {
            return Err(Error::domain("minor selectors must share one degree"));
        }
        Ok(MinorSpec {
            selectors,
            sign: Sign::Plus,
            degree,
        })
    }

    /// `(β, α¹, …, α^m)` for the hyper-Jacobian of order `m`.
    pub fn hyper_jacobian(beta: MultiIndex, alphas: Vec<MultiIndex>) -> Result<Self> {
        let mut selectors = vec![beta];
        selectors.extend(alphas);
        MinorSpec::new(selectors)
    }

    /// Sorts each raw selector; permuting the first direction costs
    /// `sgn^{m-1}`, any other direction costs `sgn`.
    pub fn from_unsorted(raw: Vec<Vec<usize>>, ambients: &[usize]) -> Result<Self> {
        if raw.len() != ambients.len() {
            return Err(Error::domain("one ambient bound per selector is required"));
        }
        let m = raw.len();
        let mut sign = Sign::Plus;
        let mut selectors = Vec::with_capacity(m);
        for (d, (entries, &ambient)) in raw.into_iter().zip(ambients).enumerate() {
            let parity = crate::multiindex::inversion_sign(&entries);
            let mut sorted = entries;
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::domain(format!("selector {sorted:?} repeats an index")));
            }
            sign = sign * if d == 0 { parity.pow(m - 1) } else { parity };
            selectors.push(MultiIndex::new(sorted, ambient)?);
        }
        let mut spec = MinorSpec::new(selectors)?;
        spec.sign = sign;
        Ok(spec)
    }

    /// Full selection of an `N^m` cube.
    pub fn full(order: usize, dims: usize) -> Result<Self> {
        MinorSpec::new(vec![MultiIndex::leading(order, order)?; dims])
    }

    pub fn selectors(&self) -> &[MultiIndex] {
        &self.selectors
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// Number of directions selected.
    pub fn dims(&self) -> usize {
        self.selectors.len()
    }

    pub fn check_fits(&self, orders: &[usize]) -> Result<()> {
        if orders.len() != self.selectors.len() {
            return Err(Error::domain(format!(
                "spec selects {} directions, matrix has {}",
                self.selectors.len(),
                orders.len()
            )));
        }
        for (d, (sel, &n)) in self.selectors.iter().zip(orders).enumerate() {
            if let Some(&last) = sel.entries().last() {
                if last > n {
                    return Err(Error::domain(format!(
                        "selector {sel} exceeds order {n} in direction {}",
                        d + 1
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Laplace expansion of the `(β, α)` minor of an ordinary matrix along row
/// `i ∈ β`, using the adjoint entries
/// `σ(i, β−i) σ(j, α−j) det A^{β−i}_{α−j}`.
pub fn laplace_expand<T: Scalar>(
    a: &HyperMatrix<T>,
    alpha: &MultiIndex,
    beta: &MultiIndex,
    i: usize,
) -> Result<T> {
    if a.dims() != 2 {
        return Err(Error::domain("Laplace expansion needs a 2-dimensional matrix"));
    }
    if alpha.len() != beta.len() {
        return Err(Error::domain("row and column indices differ in length"));
    }
    if !beta.contains(i) {
        return Err(Error::domain(format!("row {i} is not in {beta}")));
    }
    let options = DetOptions::default();
    let rows = beta.remove(i)?;
    let row_sign = sigma(&MultiIndex::single(i, beta.ambient())?, &rows)?;
    let mut acc = T::zero();
    for &j in alpha.entries() {
        let cols = alpha.remove(j)?;
        let col_sign = sigma(&MultiIndex::single(j, alpha.ambient())?, &cols)?;
        let sub = MinorSpec::new(vec![rows.clone(), cols])?;
        let cofactor = (row_sign * col_sign).apply(a.minor_det(&sub, &options)?);
        acc = acc + a.get(&[i, j])?.clone() * cofactor;
    }
    Ok(acc)
}

/// Both sides of the multilinear estimate
/// `|M(A) − M(B)| ≤ (r!)^{d−1} · r · ‖A−B‖∞ · (‖A‖∞^{r−1} + ‖B‖∞^{r−1})`
/// for a minor of degree `r` in a `d`-dimensional matrix.
pub fn minor_difference_bound<T: Scalar>(
    a: &HyperMatrix<T>,
    b: &HyperMatrix<T>,
    spec: &MinorSpec,
    options: &DetOptions,
) -> Result<(T, T)> {
    let diff = a.sub(b)?;
    let lhs = (a.minor_det(spec, options)? - b.minor_det(spec, options)?).abs_value();
    let r = spec.degree();
    if r == 0 {
        return Ok((lhs, T::zero()));
    }
    let terms = factorial(r).pow((a.dims() - 1) as u32);
    let power = |x: T| (1..r).fold(T::one(), |acc, _| acc * x.clone());
    let constant = T::from_i64(terms as i64) * T::from_i64(r as i64);
    let rhs = constant * diff.max_abs() * (power(a.max_abs()) + power(b.max_abs()));
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn random_cube(rng: &mut ChaCha8Rng, n: usize, m: usize) -> HyperMatrix<BigRational> {
        HyperMatrix::from_fn(vec![n; m], |_| {
            BigRational::new(
                BigInt::from(rng.random_range(-9i64..=9)),
                BigInt::from(rng.random_range(1i64..=5)),
            )
        })
        .unwrap()
    }

    /// Textbook oracle: sum over all index tuples with explicit inversion signs.
    fn brute_det(a: &HyperMatrix<BigRational>) -> BigRational {
        let n = a.cube_order().unwrap();
        let m = a.dims();
        let perms: Vec<Vec<usize>> = signed_permutations(n).into_iter().map(|p| p.0).collect();
        let mut total = q(0);
        let groups = m - 1;
        let count = perms.len().pow(groups as u32);
        for code in 0..count {
            let mut c = code;
            let mut chosen = Vec::new();
            for _ in 0..groups {
                chosen.push(&perms[c % perms.len()]);
                c /= perms.len();
            }
            let mut sign = 1i64;
            for p in &chosen {
                sign *= crate::multiindex::inversion_sign(p).as_i32() as i64;
            }
            let mut term = q(sign);
            for i in 0..n {
                let mut index = vec![i + 1];
                index.extend(chosen.iter().map(|p| p[i] + 1));
                term *= a.get(&index).unwrap().clone();
            }
            total += term;
        }
        total
    }

    #[test]
    fn two_by_two_determinant() {
        let a = HyperMatrix::from_rows(vec![vec![q(1), q(2)], vec![q(3), q(4)]]).unwrap();
        assert_eq!(a.det_full(&DetOptions::default()).unwrap(), q(-2));
        assert_eq!(a.det_layer_fold(&DetOptions::default()).unwrap(), q(-2));
    }

    #[test]
    fn three_dim_order_two_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_cube(&mut rng, 2, 3);
        let e = |i: usize, j: usize, k: usize| a.get(&[i, j, k]).unwrap().clone();
        let expected = e(1, 1, 1) * e(2, 2, 2) - e(1, 2, 1) * e(2, 1, 2) - e(1, 1, 2) * e(2, 2, 1)
            + e(1, 2, 2) * e(2, 1, 1);
        assert_eq!(a.det_full(&DetOptions::default()).unwrap(), expected);
    }

    #[test]
    fn diagonal_four_dim() {
        let a = HyperMatrix::from_fn(vec![2; 4], |ix| {
            if ix.iter().all(|&v| v == ix[0]) {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        assert_eq!(a.det_full(&DetOptions::default()).unwrap(), 1.0);
    }

    #[test]
    fn all_ones_three_dim_vanishes() {
        let a = HyperMatrix::new(vec![2, 2, 2], vec![1.0; 8]).unwrap();
        assert_eq!(a.det_full(&DetOptions::default()).unwrap(), 0.0);
    }

    #[test]
    fn vector_determinant_is_product() {
        let a = HyperMatrix::new(vec![3], vec![q(2), q(3), q(-1)]).unwrap();
        assert_eq!(a.det_full(&DetOptions::default()).unwrap(), q(-6));
    }

    #[test]
    fn single_entry_any_dimension() {
        for m in 1..6 {
            let a = HyperMatrix::new(vec![1; m], vec![q(7)]).unwrap();
            assert_eq!(a.det_full(&DetOptions::default()).unwrap(), q(7));
            assert_eq!(a.det_layer_fold(&DetOptions::default()).unwrap(), q(7));
        }
    }

    #[test]
    fn non_cube_rejected() {
        let a = HyperMatrix::new(vec![2, 3], vec![0.0; 6]).unwrap();
        assert!(matches!(a.det_full(&DetOptions::default()), Err(Error::Domain(_))));
    }

    #[test]
    fn budget_is_enforced() {
        let a = HyperMatrix::new(vec![5; 4], vec![1.0; 625]).unwrap();
        let err = a
            .det_full(&DetOptions::default().with_budget(1000))
            .unwrap_err();
        assert!(matches!(err, Error::Budget { required: 1_728_000, .. }));
    }

    #[test]
    fn full_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (n, m) in [(2, 2), (3, 2), (2, 3), (3, 3), (2, 4), (3, 4)] {
            let a = random_cube(&mut rng, n, m);
            assert_eq!(a.det_full(&DetOptions::default()).unwrap(), brute_det(&a));
        }
    }

    #[test]
    fn fold_matches_full() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (n, m) in [(3, 3), (4, 3), (3, 4), (2, 5)] {
            let a = random_cube(&mut rng, n, m);
            let opts = DetOptions::default();
            assert_eq!(a.det_layer_fold(&opts).unwrap(), a.det_full(&opts).unwrap());
        }
    }

    #[test]
    fn workers_do_not_change_exact_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_cube(&mut rng, 4, 3);
        let one = DetOptions::default();
        let four = DetOptions::default().with_workers(Workers::new(4));
        assert_eq!(a.det_full(&one).unwrap(), a.det_full(&four).unwrap());
        assert_eq!(a.det_layer_fold(&one).unwrap(), a.det_layer_fold(&four).unwrap());
    }

    #[test]
    fn layers_and_transposes() {
        let a = HyperMatrix::from_rows(vec![vec![q(1), q(2)], vec![q(3), q(4)]]).unwrap();
        assert_eq!(a.layer(1, 2).unwrap().entries(), &[q(3), q(4)]);
        let t = a.transpose(1, 2).unwrap();
        assert_eq!(t.entries(), &[q(1), q(3), q(2), q(4)]);
        assert_eq!(t.transpose(1, 2).unwrap(), a);
        let v = HyperMatrix::new(vec![3], vec![q(5), q(6), q(7)]).unwrap();
        assert_eq!(v.layer(1, 3).unwrap().as_scalar(), Some(&q(7)));
        let c = HyperMatrix::from_fn(vec![2, 2, 2], |ix| q((ix[0] * 100 + ix[1] * 10 + ix[2]) as i64))
            .unwrap();
        let slice = c.layer(3, 1).unwrap();
        assert_eq!(slice.entries(), &[q(111), q(121), q(211), q(221)]);
        assert!(a.layer(3, 1).is_err());
        assert!(a.layer(1, 3).is_err());
    }

    #[test]
    fn swapping_identity_rows_flips_sign() {
        let id = HyperMatrix::from_rows(vec![vec![q(1), q(0)], vec![q(0), q(1)]]).unwrap();
        let swapped = id.swap_layers(1, 1, 2).unwrap();
        assert_eq!(swapped.det_full(&DetOptions::default()).unwrap(), q(-1));
    }

    #[test]
    fn transpose_needs_equal_orders() {
        let a = HyperMatrix::new(vec![2, 3], vec![0.0; 6]).unwrap();
        assert!(a.transpose(1, 2).is_err());
    }

    #[test]
    fn minor_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_cube(&mut rng, 3, 2);
        let opts = DetOptions::default();
        let full = MinorSpec::full(3, 2).unwrap();
        assert_eq!(a.minor_det(&full, &opts).unwrap(), a.det_full(&opts).unwrap());
        let empty = MinorSpec::new(vec![MultiIndex::empty(3); 2]).unwrap();
        assert_eq!(a.minor_det(&empty, &opts).unwrap(), q(1));
        let spec = MinorSpec::new(vec![
            MultiIndex::new(vec![1, 2], 3).unwrap(),
            MultiIndex::new(vec![1, 3], 3).unwrap(),
        ])
        .unwrap();
        let e = |i, j| a.get(&[i, j]).unwrap().clone();
        let cofactor = e(1, 1) * e(2, 3) - e(1, 3) * e(2, 1);
        assert_eq!(a.minor_det(&spec, &opts).unwrap(), cofactor);
    }

    #[test]
    fn minor_out_of_range() {
        let a = HyperMatrix::new(vec![2, 2], vec![0.0; 4]).unwrap();
        let spec = MinorSpec::new(vec![
            MultiIndex::new(vec![3], 3).unwrap(),
            MultiIndex::new(vec![1], 3).unwrap(),
        ])
        .unwrap();
        assert!(a.minor(&spec).is_err());
    }

    #[test]
    fn unsorted_selectors_track_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let opts = DetOptions::default();
        for m in 2..=4 {
            let a = random_cube(&mut rng, 3, m);
            let sorted = MinorSpec::new(vec![MultiIndex::new(vec![1, 3], 3).unwrap(); m]).unwrap();
            let base = a.minor_det(&sorted, &opts).unwrap();
            for d in 0..m {
                let mut raw = vec![vec![1, 3]; m];
                raw[d] = vec![3, 1];
                let spec = MinorSpec::from_unsorted(raw, &vec![3; m]).unwrap();
                // swapping the two selected layers of the minor directly
                let direct = a
                    .minor(&sorted)
                    .unwrap()
                    .swap_layers(d + 1, 1, 2)
                    .unwrap()
                    .det_full(&opts)
                    .unwrap();
                assert_eq!(a.minor_det(&spec, &opts).unwrap(), direct);
                let expected = if d == 0 && m % 2 == 1 { base.clone() } else { -base.clone() };
                assert_eq!(direct, expected);
            }
        }
    }

    #[test]
    fn laplace_examples() {
        let id = HyperMatrix::from_rows(vec![vec![q(1), q(0)], vec![q(0), q(1)]]).unwrap();
        let full = MultiIndex::leading(2, 2).unwrap();
        assert_eq!(laplace_expand(&id, &full, &full, 1).unwrap(), q(1));

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = random_cube(&mut rng, 3, 2);
        let beta = MultiIndex::new(vec![1, 3], 3).unwrap();
        let alpha = MultiIndex::new(vec![2, 3], 3).unwrap();
        let spec = MinorSpec::new(vec![beta.clone(), alpha.clone()]).unwrap();
        let expected = a.minor_det(&spec, &DetOptions::default()).unwrap();
        for &i in beta.entries() {
            assert_eq!(laplace_expand(&a, &alpha, &beta, i).unwrap(), expected);
        }
        let b1 = MultiIndex::single(2, 3).unwrap();
        let a1 = MultiIndex::single(3, 3).unwrap();
        assert_eq!(laplace_expand(&a, &a1, &b1, 2).unwrap(), a.get(&[2, 3]).unwrap().clone());
        assert!(laplace_expand(&a, &alpha, &beta, 2).is_err());
    }

    #[test]
    fn difference_bound_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let opts = DetOptions::default();
        let a = random_cube(&mut rng, 3, 3);
        let spec = MinorSpec::full(3, 3).unwrap();
        let (lhs, _) = minor_difference_bound(&a, &a, &spec, &opts).unwrap();
        assert_eq!(lhs, q(0));
        let zero = HyperMatrix::zeros(vec![3; 3]).unwrap();
        let (lhs, rhs) = minor_difference_bound(&a, &zero, &spec, &opts).unwrap();
        assert_eq!(lhs, a.det_full(&opts).unwrap().abs_value());
        assert!(lhs <= rhs);
        let b = HyperMatrix::<BigRational>::zeros(vec![3, 2]).unwrap();
        assert!(minor_difference_bound(&a, &b, &spec, &opts).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn cube() -> impl Strategy<Value = HyperMatrix<BigRational>> {
            (1usize..=3, 1usize..=4).prop_flat_map(|(n, m)| {
                let count = n.pow(m as u32);
                proptest::collection::vec((-9i64..=9, 1i64..=5), count).prop_map(move |raw| {
                    let entries = raw
                        .into_iter()
                        .map(|(p, d)| BigRational::new(BigInt::from(p), BigInt::from(d)))
                        .collect();
                    HyperMatrix::new(vec![n; m], entries).unwrap()
                })
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn layer_swap_law(a in cube(), dir in 0usize..4, pick in 0usize..16) {
                let n = a.cube_order().unwrap();
                let m = a.dims();
                prop_assume!(n >= 2);
                let i = dir % m + 1;
                let j1 = pick % n + 1;
                let j2 = (pick / n) % (n - 1) + 1;
                let j2 = if j2 >= j1 { j2 + 1 } else { j2 };
                let opts = DetOptions::default();
                let before = a.det_full(&opts).unwrap();
                let after = a.swap_layers(i, j1, j2).unwrap().det_full(&opts).unwrap();
                let expected = if i == 1 { Sign::Minus.pow(m - 1) } else { Sign::Minus };
                prop_assert_eq!(after, expected.apply(before));
            }

            #[test]
            fn transposition_law(a in cube(), i in 1usize..5, j in 1usize..5) {
                let m = a.dims();
                prop_assume!(i < j && j <= m);
                prop_assume!(m % 2 == 0 || i > 1);
                let opts = DetOptions::default();
                prop_assert_eq!(
                    a.transpose(i, j).unwrap().det_full(&opts).unwrap(),
                    a.det_full(&opts).unwrap()
                );
            }

            #[test]
            fn fold_equals_full(a in cube()) {
                let opts = DetOptions::default();
                prop_assert_eq!(a.det_layer_fold(&opts).unwrap(), a.det_full(&opts).unwrap());
            }

            #[test]
            fn linear_in_first_layers((a, b) in cube().prop_flat_map(|a| {
                let orders = a.orders().to_vec();
                let count = a.entries().len();
                proptest::collection::vec((-9i64..=9, 1i64..=5), count).prop_map(move |raw| {
                    let entries = raw
                        .into_iter()
                        .map(|(p, d)| BigRational::new(BigInt::from(p), BigInt::from(d)))
                        .collect();
                    (a.clone(), HyperMatrix::new(orders.clone(), entries).unwrap())
                })
            }), c in -5i64..=5) {
                let n = a.cube_order().unwrap();
                let inner = a.entries().len() / n;
                // replace layer 1 of a by (layer 1 of a) + c·(layer 1 of b)
                let mut mixed = a.entries().to_vec();
                let mut other = a.entries().to_vec();
                for k in 0..inner {
                    mixed[k] = a.entries()[k].clone() + q(c) * b.entries()[k].clone();
                    other[k] = b.entries()[k].clone();
                }
                let mixed = HyperMatrix::new(a.orders().to_vec(), mixed).unwrap();
                let other = HyperMatrix::new(a.orders().to_vec(), other).unwrap();
                let opts = DetOptions::default();
                prop_assert_eq!(
                    mixed.det_full(&opts).unwrap(),
                    a.det_full(&opts).unwrap() + q(c) * other.det_full(&opts).unwrap()
                );
            }
        }
    }
}
