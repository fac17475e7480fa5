//! Vector fields, their hyper-Jacobians and minors as fields.

use std::collections::BTreeMap;

use super::radial::RadialField;
use super::separable::SeparableField;
use crate::calculus::ScalarField;
use crate::error::{Error, Result};
use crate::hypermatrix::{DetOptions, HyperMatrix, MinorSpec};
use crate::multiindex::{signed_permutations, MultiIndex, Sign};

/// One component of a vector field.
#[derive(Debug, Clone, PartialEq)]
pub enum Component {
    Separable(SeparableField),
    Radial(RadialField),
}

impl Component {
    pub fn dim(&self) -> usize {
        match self {
            Component::Separable(f) => f.dim(),
            Component::Radial(g) => g.dim(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Component::Separable(f) => f.eval(x),
            Component::Radial(g) => g.eval(x),
        }
    }

    pub fn as_separable(&self) -> Option<&SeparableField> {
        match self {
            Component::Separable(f) => Some(f),
            Component::Radial(_) => None,
        }
    }
}

/// `u : R^N → R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    dim: usize,
    components: Vec<Component>,
}

impl VectorField {
    pub fn new(components: Vec<Component>) -> Result<Self> {
        let dim = components
            .first()
            .map(Component::dim)
            .ok_or_else(|| Error::domain("a vector field needs at least one component"))?;
        if components.iter().any(|c| c.dim() != dim) {
            return Err(Error::domain("components disagree on the dimension"));
        }
        Ok(VectorField { dim, components })
    }

    pub fn separable(components: Vec<SeparableField>) -> Result<Self> {
        VectorField::new(components.into_iter().map(Component::Separable).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of components `n`.
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn separable_components(&self) -> Result<Vec<&SeparableField>> {
        self.components
            .iter()
            .map(|c| {
                c.as_separable()
                    .ok_or_else(|| Error::domain("symbolic expansion needs separable components"))
            })
            .collect()
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.components.iter().map(|c| c.eval(x)).collect()
    }

    /// Componentwise sum of separable fields.
    pub fn add(&self, other: &VectorField) -> Result<VectorField> {
        if self.len() != other.len() || self.dim != other.dim {
            return Err(Error::domain("vector fields differ in shape"));
        }
        let a = self.separable_components()?;
        let b = other.separable_components()?;
        VectorField::separable(a.into_iter().zip(b).map(|(f, g)| f.add(g)).collect())
    }
}

/// All non-decreasing axis tuples of length `order` in `1..=dim`.
fn multisets(dim: usize, order: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(order);
    fn rec(dim: usize, order: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == order {
            out.push(current.clone());
            return;
        }
        for a in start..=dim {
            current.push(a);
            rec(dim, order, a, current, out);
            current.pop();
        }
    }
    rec(dim, order, 1, &mut current, &mut out);
    out
}

enum Partial {
    Symbolic(SeparableField),
    Radial(RadialField),
}

/// Evaluates `D^m u` pointwise with every needed partial derived once.
pub struct JacobianEvaluator {
    order: usize,
    dim: usize,
    rows: usize,
    partials: BTreeMap<(usize, Vec<usize>), Partial>,
}

impl JacobianEvaluator {
    pub fn new(u: &VectorField, order: usize) -> Result<Self> {
        let mut partials = BTreeMap::new();
        for (c, comp) in u.components().iter().enumerate() {
            for axes in multisets(u.dim(), order) {
                let p = match comp {
                    Component::Separable(f) => Partial::Symbolic(f.partial(&axes)?),
                    Component::Radial(g) => {
                        if order > 2 {
                            return Err(Error::domain(format!(
                                "radial fields provide derivatives up to order 2, not {order}"
                            )));
                        }
                        Partial::Radial(g.clone())
                    }
                };
                partials.insert((c + 1, axes), p);
            }
        }
        Ok(JacobianEvaluator {
            order,
            dim: u.dim(),
            rows: u.len(),
            partials,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `∂_{axes} u^{component}(x)` for 1-based component and axes.
    pub fn partial_at(&self, component: usize, axes: &[usize], x: &[f64]) -> Result<f64> {
        let mut key = axes.to_vec();
        key.sort_unstable();
        match self.partials.get(&(component, key)) {
            Some(Partial::Symbolic(f)) => Ok(f.eval(x)),
            Some(Partial::Radial(g)) => g.partial_value(axes, x),
            None => Err(Error::domain(format!(
                "no partial of component {component} along {axes:?}"
            ))),
        }
    }

    /// The `(m+1)`-dimensional matrix of orders `n × N × … × N`.
    pub fn at(&self, x: &[f64]) -> Result<HyperMatrix<f64>> {
        let mut orders = vec![self.rows];
        orders.extend(std::iter::repeat_n(self.dim, self.order));
        let mut failure = None;
        let m = HyperMatrix::from_fn(orders, |ix| {
            self.partial_at(ix[0], &ix[1..], x).unwrap_or_else(|e| {
                failure.get_or_insert(e);
                0.0
            })
        })?;
        match failure {
            Some(e) => Err(e),
            None => Ok(m),
        }
    }

    /// The selected `r^{m+1}` cube, evaluated without building all of `D^m u`.
    pub fn minor_cube(&self, spec: &MinorSpec, x: &[f64]) -> Result<HyperMatrix<f64>> {
        let mut orders = vec![self.rows];
        orders.extend(std::iter::repeat_n(self.dim, self.order));
        spec.check_fits(&orders)?;
        let r = spec.degree();
        let sel = spec.selectors();
        let mut failure = None;
        let cube = HyperMatrix::from_fn(vec![r; self.order + 1], |ix| {
            let component = sel[0].entries()[ix[0] - 1];
            let axes: Vec<usize> = (1..=self.order)
                .map(|d| sel[d].entries()[ix[d] - 1])
                .collect();
            self.partial_at(component, &axes, x).unwrap_or_else(|e| {
                failure.get_or_insert(e);
                0.0
            })
        })?;
        match failure {
            Some(e) => Err(e),
            None => Ok(cube),
        }
    }
}

/// `D^m u(x)` with `a[l₁, l₂, …] = ∂_{l₂}⋯∂_{l_{m+1}} u^{l₁}(x)`.
pub fn hyper_jacobian(u: &VectorField, order: usize, x: &[f64]) -> Result<HyperMatrix<f64>> {
    JacobianEvaluator::new(u, order)?.at(x)
}

/// Symbolic `Σ_{τ_1…τ_m} Π σ(τ_k) Π_i ∂_{α¹_{τ_1(i)}}⋯∂_{α^m_{τ_m(i)}} rows[i]`.
///
/// This is the determinant of the cube whose `i`-th layer in the first
/// direction is drawn from `rows[i]`. With no derivative selectors it is the
/// product of the rows.
pub fn expand_rows(rows: &[&SeparableField], alphas: &[MultiIndex]) -> Result<SeparableField> {
    let r = rows.len();
    let dim = rows
        .first()
        .map(|f| f.dim())
        .ok_or_else(|| Error::domain("no rows to expand"))?;
    if alphas.iter().any(|a| a.len() != r) {
        return Err(Error::domain("derivative selectors must have the row count as degree"));
    }
    let perms = signed_permutations(r);
    let mut cache: BTreeMap<(usize, Vec<usize>), SeparableField> = BTreeMap::new();
    let mut total = SeparableField::zero(dim);
    let groups = alphas.len();
    let count = perms.len().pow(groups as u32);
    let mut choice = vec![0usize; groups];
    for _ in 0..count {
        let mut sign = Sign::Plus;
        for &c in &choice {
            sign = sign * perms[c].1;
        }
        let mut term = SeparableField::constant(dim, sign.as_i32() as f64);
        for (i, row) in rows.iter().enumerate() {
            let mut axes: Vec<usize> = choice
                .iter()
                .zip(alphas)
                .map(|(&c, a)| a.entries()[perms[c].0[i]])
                .collect();
            axes.sort_unstable();
            let key = (i, axes);
            if !cache.contains_key(&key) {
                let p = row.partial(&key.1)?;
                cache.insert(key.clone(), p);
            }
            let factor = &cache[&key];
            if factor.is_zero() {
                term = SeparableField::zero(dim);
                break;
            }
            term = term.product(factor);
        }
        total = total.add(&term);
        for g in (0..groups).rev() {
            choice[g] += 1;
            if choice[g] < perms.len() {
                break;
            }
            choice[g] = 0;
        }
    }
    Ok(total)
}

/// `x ↦ M^β_α(D^m u)(x)` for a fixed selector.
pub struct MinorField {
    field: VectorField,
    evaluator: JacobianEvaluator,
    spec: MinorSpec,
}

impl MinorField {
    pub fn new(u: &VectorField, order: usize, spec: MinorSpec) -> Result<Self> {
        if spec.dims() != order + 1 {
            return Err(Error::domain(format!(
                "an order-{order} minor needs {} selectors, got {}",
                order + 1,
                spec.dims()
            )));
        }
        let mut orders = vec![u.len()];
        orders.extend(std::iter::repeat_n(u.dim(), order));
        spec.check_fits(&orders)?;
        Ok(MinorField {
            field: u.clone(),
            evaluator: JacobianEvaluator::new(u, order)?,
            spec,
        })
    }

    pub fn spec(&self) -> &MinorSpec {
        &self.spec
    }

    pub fn order(&self) -> usize {
        self.evaluator.order()
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        if self.spec.degree() == 0 {
            return Ok(1.0);
        }
        let cube = self.evaluator.minor_cube(&self.spec, x)?;
        Ok(self.spec.sign().apply(cube.det_full(&DetOptions::default())?))
    }

    /// The minor as an explicit separable field.
    pub fn expand(&self) -> Result<SeparableField> {
        let comps = self.field.separable_components()?;
        if self.spec.degree() == 0 {
            return Ok(SeparableField::constant(self.field.dim(), 1.0));
        }
        let sel = self.spec.selectors();
        let rows: Vec<&SeparableField> = sel[0].entries().iter().map(|&b| comps[b - 1]).collect();
        let field = expand_rows(&rows, &sel[1..])?;
        Ok(match self.spec.sign() {
            Sign::Plus => field,
            Sign::Minus => field.scaled(-1.0),
        })
    }
}

impl ScalarField for MinorField {
    fn dim(&self) -> usize {
        self.field.dim()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.value(x).unwrap_or(f64::NAN)
    }

    /// Product of `r` rows, each at most the fastest component frequency.
    fn max_frequency(&self, axis: usize) -> f64 {
        let fastest = self
            .field
            .components()
            .iter()
            .filter_map(Component::as_separable)
            .map(|f| f.max_frequency(axis))
            .fold(0.0, f64::max);
        fastest * self.spec.degree() as f64
    }

    fn breakpoints(&self, axis: usize) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .field
            .components()
            .iter()
            .filter_map(Component::as_separable)
            .flat_map(|f| f.breakpoints(axis))
            .collect();
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

/// Scalar minor `M_α(D^m v)` of the `N^m` array of order-`m` partials,
/// expanded through `w^c = ∂_{α¹_c} v`.
pub fn scalar_minor_expand(v: &SeparableField, alphas: &[MultiIndex]) -> Result<SeparableField> {
    let first = alphas
        .first()
        .ok_or_else(|| Error::domain("a scalar minor needs at least one selector"))?;
    if first.is_empty() {
        return Ok(SeparableField::constant(v.dim(), 1.0));
    }
    let rows: Vec<SeparableField> = first
        .entries()
        .iter()
        .map(|&a| v.partial(&[a]))
        .collect::<Result<_>>()?;
    let refs: Vec<&SeparableField> = rows.iter().collect();
    expand_rows(&refs, &alphas[1..])
}

/// Pointwise `M_α(D^m v)(x)` from the assembled `r^m` cube.
pub fn scalar_minor_value(v: &Component, alphas: &[MultiIndex], x: &[f64]) -> Result<f64> {
    let m = alphas.len();
    let r = alphas.first().map_or(0, MultiIndex::len);
    if r == 0 {
        return Ok(1.0);
    }
    let u = VectorField::new(vec![v.clone()])?;
    let eval = JacobianEvaluator::new(&u, m)?;
    let mut failure = None;
    let cube = HyperMatrix::from_fn(vec![r; m], |ix| {
        let axes: Vec<usize> = ix.iter().zip(alphas).map(|(&i, a)| a.entries()[i - 1]).collect();
        eval.partial_at(1, &axes, x).unwrap_or_else(|e| {
            failure.get_or_insert(e);
            0.0
        })
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    cube.det_full(&DetOptions::default())
}

/// Regrouping of the minor around derivative slot `slot` (1-based): the
/// sum over the other permutation groups of ordinary first-order minors
/// of `v^j = ∂_{α^k_{τ_k(j)}, k ≠ slot} u^{β_j}` along `α^slot`.
pub fn regrouped_expansion(u: &VectorField, order: usize, spec: &MinorSpec, slot: usize) -> Result<SeparableField> {
    check_slot(order, spec, slot)?;
    let comps = u.separable_components()?;
    let sel = spec.selectors();
    let r = spec.degree();
    let dim = u.dim();
    if r == 0 {
        return Ok(SeparableField::constant(dim, 1.0));
    }
    let others: Vec<&MultiIndex> = (1..=order).filter(|&k| k != slot).map(|k| &sel[k]).collect();
    let perms = signed_permutations(r);
    let mut total = SeparableField::zero(dim);
    for_each_choice(perms.len(), others.len(), |choice| {
        let mut sign = spec.sign();
        for &c in choice {
            sign = sign * perms[c].1;
        }
        let rows: Vec<SeparableField> = (0..r)
            .map(|j| {
                let axes: Vec<usize> = choice
                    .iter()
                    .zip(&others)
                    .map(|(&c, a)| a.entries()[perms[c].0[j]])
                    .collect();
                comps[sel[0].entries()[j] - 1].partial(&axes)
            })
            .collect::<Result<_>>()?;
        let refs: Vec<&SeparableField> = rows.iter().collect();
        let minor = expand_rows(&refs, std::slice::from_ref(&sel[slot]))?;
        total = total.add(&minor.scaled(sign.as_i32() as f64));
        Ok(())
    })?;
    Ok(total)
}

/// Pointwise form of [`regrouped_expansion`]: each inner minor is an ordinary
/// determinant computed by elimination.
pub fn regrouped_value(eval: &JacobianEvaluator, spec: &MinorSpec, slot: usize, x: &[f64]) -> Result<f64> {
    let order = eval.order();
    check_slot(order, spec, slot)?;
    let sel = spec.selectors();
    let r = spec.degree();
    if r == 0 {
        return Ok(1.0);
    }
    let others: Vec<usize> = (1..=order).filter(|&k| k != slot).collect();
    let perms = signed_permutations(r);
    let mut total = 0.0;
    for_each_choice(perms.len(), others.len(), |choice| {
        let mut sign = spec.sign();
        for &c in choice {
            sign = sign * perms[c].1;
        }
        let mut entries = Vec::with_capacity(r * r);
        for j in 0..r {
            for col in 0..r {
                let mut axes = vec![0; order];
                for (&c, &k) in choice.iter().zip(&others) {
                    axes[k - 1] = sel[k].entries()[perms[c].0[j]];
                }
                axes[slot - 1] = sel[slot].entries()[col];
                entries.push(eval.partial_at(sel[0].entries()[j], &axes, x)?);
            }
        }
        let det = HyperMatrix::new(vec![r, r], entries)?.ordinary_det()?;
        total += sign.apply(det);
        Ok(())
    })?;
    Ok(total)
}

fn check_slot(order: usize, spec: &MinorSpec, slot: usize) -> Result<()> {
    if slot == 0 || slot > order {
        return Err(Error::domain(format!("slot {slot} outside 1..={order}")));
    }
    if spec.dims() != order + 1 {
        return Err(Error::domain("selector count does not match the order"));
    }
    Ok(())
}

fn for_each_choice(base: usize, groups: usize, mut f: impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    let mut choice = vec![0usize; groups];
    let count = base.pow(groups as u32);
    for _ in 0..count {
        f(&choice)?;
        for g in (0..groups).rev() {
            choice[g] += 1;
            if choice[g] < base {
                break;
            }
            choice[g] = 0;
        }
    }
    Ok(())
}

/// Multilinear split of a minor of `Σ_l atoms[l]` by which atom feeds each
/// selected row: the diagonal part uses one atom for every row, the rest
/// mixes at least two.
#[derive(Debug, Clone)]
pub struct AtomSplit {
    pub full: SeparableField,
    pub diagonal: SeparableField,
    pub off_diagonal: SeparableField,
}

/// `rows_of(atom)` yields the row fields of one atom in selector order.
pub fn atom_split(
    atoms: &[Vec<SeparableField>],
    alphas: &[MultiIndex],
    sign: Sign,
) -> Result<AtomSplit> {
    let k = atoms.len();
    let r = atoms
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::domain("no atoms to split"))?;
    if atoms.iter().any(|a| a.len() != r) {
        return Err(Error::domain("atoms disagree on the row count"));
    }
    let dim = atoms[0][0].dim();
    let signed = |f: SeparableField| match sign {
        Sign::Plus => f,
        Sign::Minus => f.scaled(-1.0),
    };
    let summed: Vec<SeparableField> = (0..r)
        .map(|i| atoms.iter().fold(SeparableField::zero(dim), |acc, a| acc.add(&a[i])))
        .collect();
    let full = expand_rows(&summed.iter().collect::<Vec<_>>(), alphas)?;
    let mut diagonal = SeparableField::zero(dim);
    let mut off_diagonal = SeparableField::zero(dim);
    for_each_choice(k, r, |tuple| {
        let rows: Vec<&SeparableField> = tuple.iter().enumerate().map(|(i, &l)| &atoms[l][i]).collect();
        let part = expand_rows(&rows, alphas)?;
        if tuple.iter().all(|&l| l == tuple[0]) {
            diagonal = diagonal.add(&part);
        } else {
            off_diagonal = off_diagonal.add(&part);
        }
        Ok(())
    })?;
    Ok(AtomSplit {
        full: signed(full),
        diagonal: signed(diagonal),
        off_diagonal: signed(off_diagonal),
    })
}
