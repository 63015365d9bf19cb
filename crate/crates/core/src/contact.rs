//! The Darboux model on `R^{2n+1}`: contact form, Reeb field, contact
//! Hamiltonians, Lagrange bracket and the basis of `sp(2n+2)`.
//!
//! Sign conventions: the contact form is `½(Σ(p_k dq_k − q_k dp_k) − dt)`, so
//! the Reeb field is `E = −2∂_t`. Every formula below inherits that sign.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::json;

use crate::algebra::linalg::express_in_span;
use crate::algebra::{fmt_rational, int, rat, Coord, DiffOp, Monomial, Poly, Rational, Var, VarTable};
use crate::error::{Error, Result};

/// A polynomial vector field on the base, one component per coordinate in
/// table order `(p_1..p_n, q_1..q_n, t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VField {
    table: Arc<VarTable>,
    comps: Vec<Poly>,
}

impl VField {
    /// Components may live in any table of the same `n` but must not contain
    /// fiber variables.
    pub fn new(comps: Vec<Poly>) -> Result<VField> {
        let first = comps
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty component list".into()))?;
        let base = VarTable::base(first.table().n());
        if comps.len() != base.block_len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} components, got {}",
                base.block_len(),
                comps.len()
            )));
        }
        let comps = comps
            .iter()
            .map(|c| c.restrict(&base))
            .collect::<Result<Vec<_>>>()?;
        Ok(VField { table: base, comps })
    }

    pub fn zero(n: usize) -> VField {
        let base = VarTable::base(n);
        let comps = vec![Poly::zero(&base); base.block_len()];
        VField { table: base, comps }
    }

    /// `c · ∂_coord`.
    pub fn partial(n: usize, coord: Coord, c: Rational) -> VField {
        let mut f = VField::zero(n);
        let i = coord.offset(n);
        f.comps[i] = Poly::constant(&f.table, c);
        f
    }

    /// Full Euler field `Σ x_i ∂_{x_i}` over `(p, q, t)`.
    pub fn euler(n: usize) -> VField {
        let mut f = VField::euler_spatial(n);
        let t = f.table.t();
        f.comps[t.0] = Poly::var(&f.table, t);
        f
    }

    /// Spatial Euler field `Σ (p_i ∂_{p_i} + q_i ∂_{q_i})`.
    pub fn euler_spatial(n: usize) -> VField {
        let mut f = VField::zero(n);
        for i in 0..2 * n {
            f.comps[i] = Poly::var(&f.table, Var(i));
        }
        f
    }

    /// The Reeb field `E = −2∂_t`.
    pub fn reeb(n: usize) -> VField {
        VField::partial(n, Coord::T, int(-2))
    }

    pub fn n(&self) -> usize {
        self.table.n()
    }

    pub fn table(&self) -> &Arc<VarTable> {
        &self.table
    }

    pub fn components(&self) -> &[Poly] {
        &self.comps
    }

    pub fn component(&self, c: Coord) -> &Poly {
        &self.comps[c.offset(self.n())]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Poly::is_zero)
    }

    /// Components re-expressed over `table` (same `n`).
    pub fn components_in(&self, table: &Arc<VarTable>) -> Vec<Poly> {
        self.comps
            .iter()
            .map(|c| c.lift(table).expect("same n"))
            .collect()
    }

    /// `X(f) = Σ X^i ∂_i f` for `f` over any table with the same `n`.
    pub fn apply(&self, f: &Poly) -> Poly {
        let comps = self.components_in(f.table());
        let mut out = Poly::zero(f.table());
        for (i, c) in comps.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = f.diff(Var(i));
            if !d.is_zero() {
                out.add_assign_ref(&(c * &d));
            }
        }
        out
    }

    /// `X` as a first-order operator acting on polynomials over `table`.
    pub fn as_diffop(&self, table: &Arc<VarTable>) -> DiffOp {
        let mut op = DiffOp::zero(table);
        for (i, c) in self.components_in(table).into_iter().enumerate() {
            op.add_assign(&DiffOp::vector(c, Var(i)));
        }
        op
    }

    /// `∂_j X^i`.
    pub fn jacobian(&self, i: usize, j: usize) -> Poly {
        self.comps[i].diff(Var(j))
    }

    pub fn add(&self, other: &VField) -> VField {
        let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect();
        VField { table: self.table.clone(), comps }
    }

    pub fn scale(&self, c: &Rational) -> VField {
        let comps = self.comps.iter().map(|a| a.scale(c)).collect();
        VField { table: self.table.clone(), comps }
    }

    /// Multiplies every component by a base polynomial.
    pub fn mul_poly(&self, f: &Poly) -> VField {
        let f = f.lift(&self.table).expect("base polynomial");
        let comps = self.comps.iter().map(|a| a * &f).collect();
        VField { table: self.table.clone(), comps }
    }

    pub fn checked_bracket(&self, other: &VField) -> Result<VField> {
        if self.n() != other.n() {
            return Err(Error::TableMismatch(self.table.to_string(), other.table.to_string()));
        }
        Ok(self.bracket(other))
    }

    /// `[X, Y]^i = X(Y^i) − Y(X^i)`.
    pub fn bracket(&self, other: &VField) -> VField {
        let comps = (0..self.comps.len())
            .map(|i| &self.apply(&other.comps[i]) - &other.apply(&self.comps[i]))
            .collect();
        VField { table: self.table.clone(), comps }
    }

    /// `Σ ∂_i X^i`.
    pub fn divergence(&self) -> Poly {
        let mut out = Poly::zero(&self.table);
        for (i, c) in self.comps.iter().enumerate() {
            out.add_assign_ref(&c.diff(Var(i)));
        }
        out
    }

    /// The contact form evaluated on the field:
    /// `½(Σ(p_k X^{q_k} − q_k X^{p_k}) − X^t)`.
    pub fn alpha_of(&self) -> Poly {
        let t = &self.table;
        let n = t.n();
        let mut out = -&self.comps[t.t().0];
        for k in 1..=n {
            let p = Poly::var(t, t.p(k));
            let q = Poly::var(t, t.q(k));
            out.add_assign_ref(&(&p * &self.comps[t.q(k).0]));
            out.add_assign_ref(&-(&q * &self.comps[t.p(k).0]));
        }
        out.scale(&rat(1, 2))
    }
}

impl fmt::Display for VField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .comps
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("({c})*d[{}]", self.table.name(Var(i))))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

fn base_poly(h: &Poly) -> Result<Poly> {
    if let Some(v) = h.first_fiber_var() {
        return Err(Error::FiberVariable(h.table().name(v)));
    }
    h.restrict(&VarTable::base(h.table().n()))
}

/// The contact vector field of a Hamiltonian `h`:
/// `X^{p_k} = −∂_{q_k}h − (∂_t h) p_k`, `X^{q_k} = ∂_{p_k}h − (∂_t h) q_k`,
/// `X^t = E_s(h) − 2h`.
pub fn contact_hamiltonian(h: &Poly) -> Result<VField> {
    let h = base_poly(h)?;
    let t = h.table().clone();
    let n = t.n();
    let ht = h.diff(t.t());
    let mut comps = vec![Poly::zero(&t); t.block_len()];
    let mut es = Poly::zero(&t);
    for k in 1..=n {
        let p = Poly::var(&t, t.p(k));
        let q = Poly::var(&t, t.q(k));
        let hp = h.diff(t.p(k));
        let hq = h.diff(t.q(k));
        es.add_assign_ref(&(&p * &hp));
        es.add_assign_ref(&(&q * &hq));
        comps[t.p(k).0] = &(-&hq) - &(&ht * &p);
        comps[t.q(k).0] = &hp - &(&ht * &q);
    }
    comps[t.t().0] = &es - &h.scale(&int(2));
    Ok(VField { table: t, comps })
}

/// `{h, g} = X_h(g) − g E(h)` with the Reeb field `E = −2∂_t`.
pub fn lagrange_bracket(h: &Poly, g: &Poly) -> Result<Poly> {
    lagrange_bracket_with_reeb(h, g, &VField::reeb(h.table().n()))
}

/// Same bracket with an explicitly supplied Reeb field. Only the self-test
/// fault injection passes anything other than [`VField::reeb`].
pub fn lagrange_bracket_with_reeb(h: &Poly, g: &Poly, reeb: &VField) -> Result<Poly> {
    let h = base_poly(h)?;
    let g = base_poly(g)?;
    if h.table().n() != g.table().n() {
        return Err(Error::TableMismatch(h.table().to_string(), g.table().to_string()));
    }
    let xh = contact_hamiltonian(&h)?;
    Ok(&xh.apply(&g) - &(&g * &reeb.apply(&h)))
}

/// Labels of the `sp(2n+2)` generators, named by their Hamiltonians.
/// `PQ { p: j, q: i }` is `X_{p_j q_i}`. Indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpLabel {
    One,
    P(usize),
    Q(usize),
    T,
    PP(usize, usize),
    QQ(usize, usize),
    PQ { p: usize, q: usize },
    TP(usize),
    TQ(usize),
    T2,
}

impl SpLabel {
    pub fn name(self) -> String {
        match self {
            SpLabel::One => "1".into(),
            SpLabel::P(i) => format!("p{i}"),
            SpLabel::Q(i) => format!("q{i}"),
            SpLabel::T => "t".into(),
            SpLabel::PP(i, j) => format!("p{i}p{j}"),
            SpLabel::QQ(i, j) => format!("q{i}q{j}"),
            SpLabel::PQ { p, q } => format!("p{p}q{q}"),
            SpLabel::TP(i) => format!("tp{i}"),
            SpLabel::TQ(i) => format!("tq{i}"),
            SpLabel::T2 => "t2".into(),
        }
    }

    /// Degree in the grading `g_{−2} ⊕ … ⊕ g_2`.
    pub fn degree(self) -> i32 {
        match self {
            SpLabel::One => -2,
            SpLabel::P(_) | SpLabel::Q(_) => -1,
            SpLabel::T | SpLabel::PP(..) | SpLabel::QQ(..) | SpLabel::PQ { .. } => 0,
            SpLabel::TP(_) | SpLabel::TQ(_) => 1,
            SpLabel::T2 => 2,
        }
    }

    /// True for the generators of the affine contact algebra:
    /// `X_1, X_{p_i}, X_{q_i}, X_t` and `sp(2n)`.
    pub fn is_affine(self) -> bool {
        self.degree() <= 0
    }

    pub fn hamiltonian(self, table: &Arc<VarTable>) -> Poly {
        let v = |x: Var| Poly::var(table, x);
        match self {
            SpLabel::One => Poly::one(table),
            SpLabel::P(i) => v(table.p(i)),
            SpLabel::Q(i) => v(table.q(i)),
            SpLabel::T => v(table.t()),
            SpLabel::PP(i, j) => &v(table.p(i)) * &v(table.p(j)),
            SpLabel::QQ(i, j) => &v(table.q(i)) * &v(table.q(j)),
            SpLabel::PQ { p, q } => &v(table.p(p)) * &v(table.q(q)),
            SpLabel::TP(i) => &v(table.t()) * &v(table.p(i)),
            SpLabel::TQ(i) => &v(table.t()) * &v(table.q(i)),
            SpLabel::T2 => v(table.t()).pow(2),
        }
    }

    /// The field written out by hand, independent of [`contact_hamiltonian`].
    pub fn closed_form_field(self, n: usize) -> VField {
        let d = |c: Coord| VField::partial(n, c, Rational::one());
        let base = VarTable::base(n);
        let x = |c: Coord| Poly::var(&base, base.coord(c));
        let tt = || x(Coord::T);
        let m1 = -Rational::one();
        let e = VField::euler(n);
        let es = VField::euler_spatial(n);
        match self {
            SpLabel::One => VField::reeb(n),
            SpLabel::P(i) => d(Coord::Q(i)).add(&d(Coord::T).mul_poly(&-x(Coord::P(i)))),
            SpLabel::Q(i) => d(Coord::P(i)).scale(&m1).add(&d(Coord::T).mul_poly(&-x(Coord::Q(i)))),
            SpLabel::T => es.scale(&m1).add(&d(Coord::T).mul_poly(&tt().scale(&int(-2)))),
            SpLabel::PP(i, j) => d(Coord::Q(i))
                .mul_poly(&x(Coord::P(j)))
                .add(&d(Coord::Q(j)).mul_poly(&x(Coord::P(i)))),
            SpLabel::QQ(i, j) => d(Coord::P(i))
                .mul_poly(&-x(Coord::Q(j)))
                .add(&d(Coord::P(j)).mul_poly(&-x(Coord::Q(i)))),
            SpLabel::PQ { p: j, q: i } => d(Coord::Q(j))
                .mul_poly(&x(Coord::Q(i)))
                .add(&d(Coord::P(i)).mul_poly(&-x(Coord::P(j)))),
            SpLabel::TP(i) => d(Coord::Q(i)).mul_poly(&tt()).add(&e.mul_poly(&-x(Coord::P(i)))),
            SpLabel::TQ(i) => d(Coord::P(i)).mul_poly(&-tt()).add(&e.mul_poly(&-x(Coord::Q(i)))),
            SpLabel::T2 => e.mul_poly(&tt().scale(&int(-2))),
        }
    }
}

impl fmt::Display for SpLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

#[derive(Clone, Debug)]
pub struct SpGenerator {
    pub label: SpLabel,
    pub hamiltonian: Poly,
    pub field: VField,
}

/// The basis of `sp(2n+2)` in the three-row order
/// `X_{p_ip_j}, X_{tp_i}, X_{t²}; X_{q_iq_j}, X_{q_i}, X_1;
/// X_{p_jq_i}, X_{tq_i}, X_{p_i}, X_t`, together with its Killing-dual basis.
#[derive(Debug)]
pub struct SpBasis {
    n: usize,
    generators: Vec<SpGenerator>,
    duals: Vec<Vec<(Rational, usize)>>,
    index: HashMap<SpLabel, usize>,
    structure: OnceLock<Vec<Vec<Vec<Rational>>>>,
}

/// Basis labels in display order.
pub fn sp_labels(n: usize) -> Vec<SpLabel> {
    let mut out = Vec::new();
    for i in 1..=n {
        for j in i..=n {
            out.push(SpLabel::PP(i, j));
        }
    }
    out.extend((1..=n).map(SpLabel::TP));
    out.push(SpLabel::T2);
    for i in 1..=n {
        for j in i..=n {
            out.push(SpLabel::QQ(i, j));
        }
    }
    out.extend((1..=n).map(SpLabel::Q));
    out.push(SpLabel::One);
    for i in 1..=n {
        for j in 1..=n {
            out.push(SpLabel::PQ { p: j, q: i });
        }
    }
    out.extend((1..=n).map(SpLabel::TQ));
    out.extend((1..=n).map(SpLabel::P));
    out.push(SpLabel::T);
    out
}

/// `k_ij = −1/(4(n+2)(1+δ_ij))`.
pub fn dual_kij(n: usize, i: usize, j: usize) -> Rational {
    let d = if i == j { 2 } else { 1 };
    rat(-1, (4 * (n + 2) * d) as i64)
}

/// `k = 1/(4(n+2))`.
pub fn dual_k(n: usize) -> Rational {
    rat(1, (4 * (n + 2)) as i64)
}

fn dual_of(label: SpLabel, n: usize) -> (Rational, SpLabel) {
    let k = dual_k(n);
    let half = rat(1, 2);
    match label {
        SpLabel::PP(i, j) => (dual_kij(n, i, j), SpLabel::QQ(i, j)),
        SpLabel::TP(i) => (-k, SpLabel::Q(i)),
        SpLabel::T2 => (-(k * half), SpLabel::One),
        SpLabel::QQ(i, j) => (dual_kij(n, i, j), SpLabel::PP(i, j)),
        SpLabel::Q(i) => (-k, SpLabel::TP(i)),
        SpLabel::One => (-(k * half), SpLabel::T2),
        SpLabel::PQ { p: j, q: i } => (k, SpLabel::PQ { p: i, q: j }),
        SpLabel::TQ(i) => (k, SpLabel::P(i)),
        SpLabel::P(i) => (k, SpLabel::TQ(i)),
        SpLabel::T => (k, SpLabel::T),
    }
}

static BASIS_CACHE: OnceLock<Mutex<HashMap<usize, Arc<SpBasis>>>> = OnceLock::new();

/// The (cached) basis for a given `n ≥ 1`.
pub fn sp_basis(n: usize) -> Result<Arc<SpBasis>> {
    if n < 1 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let cache = BASIS_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(b) = cache.lock().expect("cache lock").get(&n) {
        return Ok(b.clone());
    }
    let b = Arc::new(SpBasis::build(n)?);
    cache.lock().expect("cache lock").entry(n).or_insert(b.clone());
    Ok(b)
}

impl SpBasis {
    fn build(n: usize) -> Result<SpBasis> {
        let base = VarTable::base(n);
        let labels = sp_labels(n);
        let mut generators = Vec::with_capacity(labels.len());
        for &label in &labels {
            let hamiltonian = label.hamiltonian(&base);
            let field = contact_hamiltonian(&hamiltonian)?;
            if field != label.closed_form_field(n) {
                return Err(Error::InvalidParameter(format!(
                    "field of X_{label} disagrees with its closed form"
                )));
            }
            generators.push(SpGenerator { label, hamiltonian, field });
        }
        let index: HashMap<SpLabel, usize> =
            labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let duals = labels
            .iter()
            .map(|&l| {
                let (c, partner) = dual_of(l, n);
                vec![(c, index[&partner])]
            })
            .collect();
        Ok(SpBasis { n, generators, duals, index, structure: OnceLock::new() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[SpGenerator] {
        &self.generators
    }

    pub fn generator(&self, label: SpLabel) -> Option<&SpGenerator> {
        self.index.get(&label).map(|&i| &self.generators[i])
    }

    pub fn index_of(&self, label: SpLabel) -> Option<usize> {
        self.index.get(&label).copied()
    }

    /// The dual partner of generator `a` as a weighted combination.
    pub fn dual(&self, a: usize) -> &[(Rational, usize)] {
        &self.duals[a]
    }

    /// Dense coordinates of the dual of generator `a`.
    pub fn dual_vector(&self, a: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim()];
        for (c, i) in &self.duals[a] {
            v[*i] += c;
        }
        v
    }

    pub fn unit_vector(&self, a: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim()];
        v[a] = Rational::one();
        v
    }

    /// Field of a combination of generators.
    pub fn field_of(&self, coords: &[Rational]) -> VField {
        let mut f = VField::zero(self.n);
        for (c, g) in coords.iter().zip(&self.generators) {
            if !c.is_zero() {
                f = f.add(&g.field.scale(c));
            }
        }
        f
    }

    /// Coordinates of a field in the generator basis, by exact linear solve.
    pub fn coordinates(&self, field: &VField) -> Result<Vec<Rational>> {
        if field.n() != self.n {
            return Err(Error::InvalidParameter("field has a different n".into()));
        }
        // Coefficient vectors keyed by (component, monomial).
        let mut keys: Vec<(usize, Monomial)> = Vec::new();
        let mut key_index: HashMap<(usize, Monomial), usize> = HashMap::new();
        let mut collect = |f: &VField| -> Vec<(usize, Rational)> {
            let mut out = Vec::new();
            for (i, c) in f.components().iter().enumerate() {
                for (m, x) in c.terms() {
                    let key = (i, m.clone());
                    let idx = *key_index.entry(key.clone()).or_insert_with(|| {
                        keys.push(key);
                        keys.len() - 1
                    });
                    out.push((idx, x.clone()));
                }
            }
            out
        };
        let gen_sparse: Vec<_> = self.generators.iter().map(|g| collect(&g.field)).collect();
        let target_sparse = collect(field);
        let dense = |s: &[(usize, Rational)]| {
            let mut v = vec![Rational::zero(); keys.len()];
            for (i, x) in s {
                v[*i] = x.clone();
            }
            v
        };
        let vectors: Vec<Vec<Rational>> = gen_sparse.iter().map(|s| dense(s)).collect();
        let target = dense(&target_sparse);
        express_in_span(&vectors, &target).ok_or(Error::NotInSpan)
    }

    /// Structure constants `c[a][b][d]` with `[e_a, e_b] = Σ_d c[a][b][d] e_d`,
    /// computed from the vector-field bracket.
    pub fn structure_constants(&self) -> &Vec<Vec<Vec<Rational>>> {
        self.structure.get_or_init(|| {
            let dim = self.dim();
            (0..dim)
                .into_par_iter()
                .map(|a| {
                    (0..dim)
                        .map(|b| {
                            let br = self.generators[a].field.bracket(&self.generators[b].field);
                            self.coordinates(&br).expect("sp(2n+2) is closed under brackets")
                        })
                        .collect()
                })
                .collect()
        })
    }

    /// Matrix of `ad_x` in the generator basis: `(ad_x)[d][c]`.
    pub fn ad_matrix(&self, x: &[Rational]) -> Vec<Vec<Rational>> {
        let sc = self.structure_constants();
        let dim = self.dim();
        let mut m = vec![vec![Rational::zero(); dim]; dim];
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for c in 0..dim {
                for d in 0..dim {
                    let s = &sc[a][c][d];
                    if !s.is_zero() {
                        m[d][c] += xa * s;
                    }
                }
            }
        }
        m
    }

    /// `K(x, y) = tr(ad_x ∘ ad_y)`.
    pub fn killing_form(&self, x: &[Rational], y: &[Rational]) -> Result<Rational> {
        if x.len() != self.dim() || y.len() != self.dim() {
            return Err(Error::NotInSpan);
        }
        let ax = self.ad_matrix(x);
        let ay = self.ad_matrix(y);
        let dim = self.dim();
        let mut tr = Rational::zero();
        for i in 0..dim {
            for j in 0..dim {
                if !ax[i][j].is_zero() && !ay[j][i].is_zero() {
                    tr += &ax[i][j] * &ay[j][i];
                }
            }
        }
        Ok(tr)
    }

    /// JSON table of the basis: label, Hamiltonian, field components, dual.
    pub fn export_json(&self) -> serde_json::Value {
        let base = VarTable::base(self.n);
        let gens: Vec<serde_json::Value> = self
            .generators
            .iter()
            .enumerate()
            .map(|(a, g)| {
                let field: serde_json::Map<String, serde_json::Value> = g
                    .field
                    .components()
                    .iter()
                    .enumerate()
                    .map(|(i, c)| (base.name(Var(i)), json!(c.to_string())))
                    .collect();
                let dual: Vec<serde_json::Value> = self.duals[a]
                    .iter()
                    .map(|(c, i)| {
                        json!({"coeff": fmt_rational(c), "label": self.generators[*i].label.name()})
                    })
                    .collect();
                json!({
                    "label": g.label.name(),
                    "degree": g.label.degree(),
                    "hamiltonian": g.hamiltonian.to_string(),
                    "field": field,
                    "dual": dual,
                })
            })
            .collect();
        json!({"n": self.n, "dim": self.dim(), "generators": gens})
    }
}

/// Euler-type operator `Σ_{v in vars} v ∂_v`.
pub fn euler_on(table: &Arc<VarTable>, vars: &[Var]) -> DiffOp {
    let mut op = DiffOp::zero(table);
    for &v in vars {
        op.add_assign(&DiffOp::vector(Poly::var(table, v), v));
    }
    op
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b1() -> Arc<VarTable> {
        VarTable::base(1)
    }

    #[test]
    fn hamiltonian_examples() {
        let t = b1();
        assert_eq!(contact_hamiltonian(&Poly::one(&t)).unwrap(), VField::reeb(1));
        let xp = contact_hamiltonian(&Poly::var(&t, t.p(1))).unwrap();
        assert_eq!(xp.component(Coord::Q(1)), &Poly::one(&t));
        assert_eq!(xp.component(Coord::T), &-Poly::var(&t, t.p(1)));
        let tt = Poly::var(&t, t.t());
        let xt2 = contact_hamiltonian(&tt.pow(2)).unwrap();
        assert_eq!(xt2, VField::euler(1).mul_poly(&tt.scale(&int(-2))));
    }

    #[test]
    fn fiber_input_rejected() {
        let t = VarTable::with_xi(1);
        let xi = Poly::var(&t, t.fv(crate::algebra::Block::Xi, Coord::T));
        assert!(matches!(contact_hamiltonian(&xi), Err(Error::FiberVariable(_))));
    }

    #[test]
    fn bracket_examples() {
        let t = b1();
        let p = Poly::var(&t, t.p(1));
        let q = Poly::var(&t, t.q(1));
        let tt = Poly::var(&t, t.t());
        assert_eq!(lagrange_bracket(&p, &q).unwrap(), Poly::one(&t));
        assert_eq!(lagrange_bracket(&tt, &p).unwrap(), p);
        let g = &(&p * &tt) + &q;
        assert_eq!(
            lagrange_bracket(&Poly::one(&t), &g).unwrap(),
            g.diff(t.t()).scale(&int(-2))
        );
    }

    #[test]
    fn vfield_bracket_examples() {
        let x1 = VField::reeb(1);
        let xt = SpLabel::T.closed_form_field(1);
        assert_eq!(x1.bracket(&xt), x1.scale(&int(-2)));
        assert!(xt.bracket(&xt).is_zero());
        let dt = VField::partial(1, Coord::T, Rational::one());
        let tdt = dt.mul_poly(&Poly::var(&b1(), b1().t()));
        assert_eq!(dt.bracket(&tdt), dt);
    }

    #[test]
    fn divergence_examples() {
        let t = b1();
        assert_eq!(SpLabel::T.closed_form_field(1).divergence(), Poly::constant(&t, int(-4)));
        assert!(SpLabel::P(1).closed_form_field(1).divergence().is_zero());
        let h = &Poly::var(&t, t.p(1)) * &Poly::var(&t, t.t());
        let x = contact_hamiltonian(&h).unwrap();
        assert_eq!(x.divergence(), Poly::var(&t, t.p(1)).scale(&int(-4)));
    }

    #[test]
    fn basis_shape_and_duals() {
        let b = sp_basis(1).unwrap();
        assert_eq!(b.dim(), 10);
        assert_eq!(sp_basis(2).unwrap().dim(), 21);
        let a = b.index_of(SpLabel::PP(1, 1)).unwrap();
        let d = b.dual(a);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].0, rat(-1, 24));
        assert_eq!(b.generators()[d[0].1].label, SpLabel::QQ(1, 1));
        assert!(sp_basis(0).is_err());
    }

    #[test]
    fn killing_duality_n1() {
        let b = sp_basis(1).unwrap();
        for a in 0..b.dim() {
            for c in 0..b.dim() {
                let k = b.killing_form(&b.unit_vector(a), &b.dual_vector(c)).unwrap();
                let expected = if a == c { Rational::one() } else { Rational::zero() };
                assert_eq!(k, expected, "pair {} {}", b.generators()[a].label, b.generators()[c].label);
            }
        }
        let one = b.unit_vector(b.index_of(SpLabel::One).unwrap());
        assert!(b.killing_form(&one, &one).unwrap().is_zero());
    }

    #[test]
    fn export_has_all_generators() {
        let v = sp_basis(1).unwrap().export_json();
        assert_eq!(v["generators"].as_array().unwrap().len(), 10);
        assert_eq!(v["generators"][0]["label"], "p1p1");
    }
}
