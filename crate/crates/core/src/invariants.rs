//! Invariant tensor fields in `S^{km}_{ℓ;ν}`: the classical generators, exact
//! invariant-space dimensions, and the counting system they are compared to.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::algebra::linalg::{kernel_of_columns, rank};
use crate::algebra::{fmt_rational, int, rat, Block, Coord, DiffOp, Monomial, Poly, Rational, Var, VarTable};
use crate::contact::{sp_basis, SpLabel, VField};
use crate::error::{Error, Result};
use crate::symbols::{lie_action_as_diffop, ActionContext, Module, SymbolElem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum GeneratorName {
    U1,
    U2,
    U3,
    U4,
    U5,
    L1,
}

impl GeneratorName {
    pub const ALL: [GeneratorName; 6] = [
        GeneratorName::U1,
        GeneratorName::U2,
        GeneratorName::U3,
        GeneratorName::U4,
        GeneratorName::U5,
        GeneratorName::L1,
    ];

    pub fn parse(s: &str) -> Result<GeneratorName> {
        match s {
            "u1" => Ok(GeneratorName::U1),
            "u2" => Ok(GeneratorName::U2),
            "u3" => Ok(GeneratorName::U3),
            "u4" => Ok(GeneratorName::U4),
            "u5" => Ok(GeneratorName::U5),
            "L1" => Ok(GeneratorName::L1),
            other => Err(Error::InvalidParameter(format!("unknown generator `{other}`"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GeneratorName::U1 => "u1",
            GeneratorName::U2 => "u2",
            GeneratorName::U3 => "u3",
            GeneratorName::U4 => "u4",
            GeneratorName::U5 => "u5",
            GeneratorName::L1 => "L1",
        }
    }

    /// `(k, m, ℓ, (n+1)ν)`.
    pub fn degrees(self) -> (u32, u32, u32, i64) {
        match self {
            GeneratorName::U1 => (1, 0, 1, 0),
            GeneratorName::U2 => (0, 1, 1, 0),
            GeneratorName::U3 => (0, 0, 1, -1),
            GeneratorName::U4 => (1, 0, 0, 1),
            GeneratorName::U5 => (0, 1, 0, 1),
            GeneratorName::L1 => (1, 1, 0, 1),
        }
    }

    pub fn module(self, n: usize) -> Module {
        let (k, m, l, w) = self.degrees();
        Module::s(k, m, l, rat(w, (n + 1) as i64))
    }
}

#[derive(Clone, Debug)]
pub struct InvariantGenerator {
    pub name: GeneratorName,
    pub elem: SymbolElem,
}

fn fib(t: &Arc<VarTable>, b: Block, c: Coord) -> Poly {
    Poly::var(t, t.fv(b, c))
}

/// `Σ_c A_c B_c` over all coordinates of two fiber blocks.
fn pairing(t: &Arc<VarTable>, a: Block, b: Block) -> Poly {
    let mut out = Poly::zero(t);
    for c in t.coords() {
        out.add_assign_ref(&(&fib(t, a, c) * &fib(t, b, c)));
    }
    out
}

/// `⟨E_s, ·⟩` for a fiber block: `Σ (p_i A_{p_i} + q_i A_{q_i})`.
fn spatial_euler_pairing(t: &Arc<VarTable>, b: Block) -> Poly {
    let mut out = Poly::zero(t);
    for c in t.coords().filter(|c| c.is_spatial()) {
        out.add_assign_ref(&(&Poly::var(t, t.coord(c)) * &fib(t, b, c)));
    }
    out
}

/// The classical generators in local form.
pub fn generator(name: GeneratorName, n: usize) -> Result<InvariantGenerator> {
    if n < 1 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let t = VarTable::full(n);
    let poly = match name {
        GeneratorName::U1 => pairing(&t, Block::Y, Block::Xi),
        GeneratorName::U2 => pairing(&t, Block::Y, Block::Eta),
        GeneratorName::U3 => {
            // The contact form evaluated on Y, read as a vector field.
            let comps: Vec<Poly> = t.coords().map(|c| fib(&t, Block::Y, c)).collect();
            alpha_on_fiber(&t, &comps)
        }
        GeneratorName::U4 => fib(&t, Block::Xi, Coord::T).scale(&int(-2)),
        GeneratorName::U5 => fib(&t, Block::Eta, Coord::T).scale(&int(-2)),
        GeneratorName::L1 => {
            let mut l = Poly::zero(&t);
            for i in 1..=n {
                let (p, q) = (Coord::P(i), Coord::Q(i));
                l.add_assign_ref(&(&fib(&t, Block::Xi, p) * &fib(&t, Block::Eta, q)));
                l.add_assign_ref(&-(&fib(&t, Block::Xi, q) * &fib(&t, Block::Eta, p)));
            }
            l.add_assign_ref(&(&fib(&t, Block::Eta, Coord::T) * &spatial_euler_pairing(&t, Block::Xi)));
            l.add_assign_ref(&-(&fib(&t, Block::Xi, Coord::T) * &spatial_euler_pairing(&t, Block::Eta)));
            l
        }
    };
    let elem = SymbolElem::new(poly, name.module(n))?;
    Ok(InvariantGenerator { name, elem })
}

/// `½(Σ(p_k Y^{q_k} − q_k Y^{p_k}) − Y^t)` for components living in a fiber
/// block.
fn alpha_on_fiber(t: &Arc<VarTable>, comps: &[Poly]) -> Poly {
    let n = t.n();
    let mut out = -&comps[Coord::T.offset(n)];
    for k in 1..=n {
        let p = Poly::var(t, t.p(k));
        let q = Poly::var(t, t.q(k));
        out.add_assign_ref(&(&p * &comps[Coord::Q(k).offset(n)]));
        out.add_assign_ref(&-(&q * &comps[Coord::P(k).offset(n)]));
    }
    out.scale(&rat(1, 2))
}

/// Product of two `S`-module elements: degrees and weights add.
pub fn symbol_product(a: &SymbolElem, b: &SymbolElem) -> Result<SymbolElem> {
    match (&a.module, &b.module) {
        (
            Module::S { k: k1, m: m1, l: l1, nu: v1 },
            Module::S { k: k2, m: m2, l: l2, nu: v2 },
        ) => SymbolElem::new(
            a.poly.checked_mul(&b.poly)?,
            Module::s(k1 + k2, m1 + m2, l1 + l2, v1 + v2),
        ),
        _ => Err(Error::ModuleMismatch("products are defined on S modules".into())),
    }
}

/// Which generating set the invariance is tested against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Algebra {
    #[serde(rename = "affine_contact")]
    AffineContact,
    #[serde(rename = "full_sp")]
    FullSp,
}

impl Algebra {
    pub fn parse(s: &str) -> Result<Algebra> {
        match s {
            "affine" | "affine_contact" => Ok(Algebra::AffineContact),
            "contact" | "full" | "full_sp" => Ok(Algebra::FullSp),
            other => Err(Error::InvalidParameter(format!("unknown algebra `{other}`"))),
        }
    }

    pub fn includes(self, label: SpLabel) -> bool {
        match self {
            Algebra::AffineContact => label.is_affine(),
            Algebra::FullSp => true,
        }
    }
}

/// Generating fields of the chosen algebra, in basis order.
pub fn generating_fields(n: usize, algebra: Algebra) -> Result<Vec<(SpLabel, VField)>> {
    let basis = sp_basis(n)?;
    Ok(basis
        .generators()
        .iter()
        .filter(|g| algebra.includes(g.label))
        .map(|g| (g.label, g.field.clone()))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantQuery {
    pub n: usize,
    pub k: u32,
    pub m: u32,
    pub l: u32,
    #[serde(serialize_with = "ser_rational")]
    pub nu: Rational,
    pub algebra: Algebra,
    pub x_degree_bound: u32,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(r))
}

impl InvariantQuery {
    /// Uses the default base-degree bound `ℓ + min(k, m) + 1`.
    pub fn new(n: usize, k: u32, m: u32, l: u32, nu: Rational, algebra: Algebra) -> InvariantQuery {
        let x_degree_bound = l + k.min(m) + 1;
        InvariantQuery { n, k, m, l, nu, algebra, x_degree_bound }
    }

    pub fn with_bound(mut self, bound: u32) -> InvariantQuery {
        self.x_degree_bound = bound;
        self
    }

    pub fn module(&self) -> Module {
        Module::s(self.k, self.m, self.l, self.nu.clone())
    }
}

#[derive(Clone, Debug)]
pub struct InvariantSpace {
    pub dimension: usize,
    pub basis: Vec<SymbolElem>,
    pub unknowns: usize,
    pub unknowns_after_prefilter: usize,
}

/// Ansatz monomials: fiber degrees `(k, m, ℓ)`, base degree at most `bound`.
pub fn ansatz_monomials(t: &Arc<VarTable>, k: u32, m: u32, l: u32, bound: u32) -> Vec<Monomial> {
    let nv = t.len();
    let base: Vec<Var> = t.coords().map(|c| t.coord(c)).collect();
    let parts = [
        Monomial::all_up_to_degree(nv, &base, bound),
        Monomial::all_of_degree(nv, &t.block_vars(Block::Xi), k),
        Monomial::all_of_degree(nv, &t.block_vars(Block::Eta), m),
        Monomial::all_of_degree(nv, &t.block_vars(Block::Y), l),
    ];
    let mut out = vec![Monomial::one(nv)];
    for part in &parts {
        out = out
            .iter()
            .flat_map(|a| part.iter().map(move |b| a.mul(b)))
            .collect();
    }
    out.sort();
    out
}

/// Eigenvalue of a diagonal operator on a monomial.
pub fn diagonal_eigenvalue(w: &(Vec<Rational>, Rational), m: &Monomial) -> Rational {
    let mut e = w.1.clone();
    for (wi, &a) in w.0.iter().zip(m.exps()) {
        if a > 0 && !wi.is_zero() {
            e += wi * Rational::from_integer(BigInt::from(a));
        }
    }
    e
}

/// Kernel of `{Q ↦ op(Q) : op in ops}` on the span of `unknowns`. Diagonal
/// operators are used first to discard every monomial they do not kill; the
/// remaining equations are solved by sparse elimination.
pub fn common_kernel(ops: &[DiffOp], unknowns: &[Monomial]) -> (Vec<Vec<Rational>>, Vec<Monomial>) {
    let mut kept: Vec<Monomial> = unknowns.to_vec();
    let mut rest = Vec::new();
    for op in ops {
        match op.diagonal_weights() {
            Some(w) => kept.retain(|m| diagonal_eigenvalue(&w, m).is_zero()),
            None => rest.push(op),
        }
    }
    if kept.is_empty() {
        return (Vec::new(), kept);
    }
    let table = ops.first().map(|o| o.table().clone());
    let columns: Vec<Vec<((usize, Monomial), Rational)>> = kept
        .par_iter()
        .map(|m| {
            let t = table.as_ref().expect("nonempty op list");
            let src = Poly::term(t, m.clone(), Rational::one());
            let mut col = Vec::new();
            for (i, op) in rest.iter().enumerate() {
                for (mon, c) in op.apply(&src).terms() {
                    col.push(((i, mon.clone()), c.clone()));
                }
            }
            col
        })
        .collect();
    (kernel_of_columns(&columns), kept)
}

/// Exact dimension and basis of the invariants of a query, within its
/// base-degree ansatz.
pub fn invariant_space_dim(q: &InvariantQuery) -> Result<InvariantSpace> {
    let ctx = ActionContext::new(q.n, q.module());
    let t = ctx.table();
    let unknowns = ansatz_monomials(&t, q.k, q.m, q.l, q.x_degree_bound);
    let ops: Vec<DiffOp> = generating_fields(q.n, q.algebra)?
        .par_iter()
        .map(|(_, f)| lie_action_as_diffop(f, &ctx))
        .collect();
    let (kernel, kept) = common_kernel(&ops, &unknowns);
    let basis = kernel
        .iter()
        .map(|v| {
            let p = Poly::from_terms(&t, kept.iter().cloned().zip(v.iter().cloned()));
            SymbolElem::new(p, q.module())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(InvariantSpace {
        dimension: basis.len(),
        basis,
        unknowns: unknowns.len(),
        unknowns_after_prefilter: kept.len(),
    })
}

/// `(n+1)ν` when it is an integer.
pub fn integral_weight(n: usize, nu: &Rational) -> Option<i64> {
    let w = nu * Rational::from_integer(BigInt::from(n + 1));
    if w.is_integer() {
        i64::try_from(w.to_integer()).ok()
    } else {
        None
    }
}

/// Exponents `(a, b, c, d, e, f)` of `u1^a u2^b u3^c u4^d u5^e L1^f` solving
/// `a+d+f=k, b+e+f=m, a+b+c=ℓ, d+e+f−c=(n+1)ν`. `contact_only` forces
/// `d = e = 0`.
pub fn s1_solutions(n: usize, k: u32, m: u32, l: u32, nu: &Rational, contact_only: bool) -> Vec<[u32; 6]> {
    let Some(w) = integral_weight(n, nu) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for f in 0..=k.min(m) {
        for a in 0..=(k - f) {
            let d = k - f - a;
            for b in 0..=(m - f) {
                let e = m - f - b;
                if a + b > l {
                    continue;
                }
                let c = l - a - b;
                if (d + e + f) as i64 - c as i64 != w {
                    continue;
                }
                if contact_only && (d != 0 || e != 0) {
                    continue;
                }
                out.push([a, b, c, d, e, f]);
            }
        }
    }
    out.sort();
    out
}

pub fn count_s1(n: usize, k: u32, m: u32, l: u32, nu: &Rational, contact_only: bool) -> usize {
    s1_solutions(n, k, m, l, nu, contact_only).len()
}

/// One classical product per counting-system solution.
pub fn monomial_basis_classical(
    n: usize,
    k: u32,
    m: u32,
    l: u32,
    nu: &Rational,
    contact_only: bool,
) -> Result<Vec<([u32; 6], SymbolElem)>> {
    let gens: Vec<SymbolElem> = GeneratorName::ALL
        .iter()
        .map(|&g| generator(g, n).map(|x| x.elem))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for ex in s1_solutions(n, k, m, l, nu, contact_only) {
        let mut acc = SymbolElem::new(Poly::one(&VarTable::full(n)), Module::s(0, 0, 0, Rational::zero()))?;
        for (g, &e) in gens.iter().zip(&ex) {
            for _ in 0..e {
                acc = symbol_product(&acc, g)?;
            }
        }
        out.push((ex, acc));
    }
    Ok(out)
}

/// Coefficient vectors of polynomials over a common monomial index.
pub fn coefficient_vectors(polys: &[&Poly]) -> Vec<Vec<Rational>> {
    let mut index: BTreeMap<Monomial, usize> = BTreeMap::new();
    for p in polys {
        for (m, _) in p.terms() {
            let len = index.len();
            index.entry(m.clone()).or_insert(len);
        }
    }
    polys
        .iter()
        .map(|p| {
            let mut v = vec![Rational::zero(); index.len()];
            for (m, c) in p.terms() {
                v[index[m]] = c.clone();
            }
            v
        })
        .collect()
}

/// True when `a` and `b` span the same space.
pub fn same_span(a: &[&Poly], b: &[&Poly]) -> bool {
    let all: Vec<&Poly> = a.iter().chain(b).copied().collect();
    let vecs = coefficient_vectors(&all);
    let ncols = vecs.first().map_or(0, Vec::len);
    let (va, vb) = vecs.split_at(a.len());
    let ra = rank(va, ncols);
    ra == rank(vb, ncols) && ra == rank(&vecs, ncols)
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantReport {
    pub query: InvariantQuery,
    pub solver_dim: usize,
    pub count_s1: usize,
    pub matches: bool,
    pub classical_spans: bool,
    pub basis: Vec<String>,
    pub classical: Vec<String>,
}

impl InvariantReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "query": self.query,
            "solver_dim": self.solver_dim,
            "count_S1": self.count_s1,
            "match": self.matches,
            "classical_spans": self.classical_spans,
            "basis": self.basis,
            "classical": self.classical,
        })
    }
}

/// Runs the solver and compares it with the counting system and the
/// classical products.
pub fn invariant_report(q: &InvariantQuery) -> Result<InvariantReport> {
    let space = invariant_space_dim(q)?;
    let contact_only = q.algebra == Algebra::FullSp;
    let classical = monomial_basis_classical(q.n, q.k, q.m, q.l, &q.nu, contact_only)?;
    let count = classical.len();
    let a: Vec<&Poly> = space.basis.iter().map(|s| &s.poly).collect();
    let b: Vec<&Poly> = classical.iter().map(|(_, s)| &s.poly).collect();
    let classical_spans = same_span(&a, &b);
    let names = ["u1", "u2", "u3", "u4", "u5", "L1"];
    Ok(InvariantReport {
        query: q.clone(),
        solver_dim: space.dimension,
        count_s1: count,
        matches: space.dimension == count,
        classical_spans,
        basis: space.basis.iter().map(|s| s.poly.to_string()).collect(),
        classical: classical
            .iter()
            .map(|(ex, _)| {
                let parts: Vec<String> = names
                    .iter()
                    .zip(ex)
                    .filter(|(_, &e)| e > 0)
                    .map(|(nm, &e)| if e == 1 { nm.to_string() } else { format!("{nm}^{e}") })
                    .collect();
                if parts.is_empty() { "1".to_string() } else { parts.join("*") }
            })
            .collect(),
    })
}

/// Result of applying one generating field to one classical generator.
#[derive(Clone, Debug, Serialize)]
pub struct InvarianceCheck {
    pub generator: &'static str,
    pub field: String,
    pub vanishes: bool,
}

/// `L_X g` for every classical generator `g` and every basis field `X`.
pub fn generator_invariance(n: usize) -> Result<Vec<InvarianceCheck>> {
    let basis = sp_basis(n)?;
    let mut out = Vec::new();
    for name in GeneratorName::ALL {
        let g = generator(name, n)?;
        for gen in basis.generators() {
            let image = crate::symbols::lie_action_symbol(&gen.field, &g.elem)?;
            out.push(InvarianceCheck {
                generator: name.name(),
                field: gen.label.name(),
                vanishes: image.poly.is_zero(),
            });
        }
    }
    Ok(out)
}

/// Rebuilds each generator from the Weyl-type building blocks
/// `⟨Y_s,ξ_s⟩, ⟨Y_s,η_s⟩, Π(ξ_s,η_s), ξ_t, η_t, Y_t` plus the base-linear
/// corrections, and compares with [`generator`].
pub fn weyl_structure_holds(n: usize) -> Result<bool> {
    let t = VarTable::full(n);
    let spatial_pair = |a: Block, b: Block| {
        let mut out = Poly::zero(&t);
        for c in t.coords().filter(|c| c.is_spatial()) {
            out.add_assign_ref(&(&fib(&t, a, c) * &fib(&t, b, c)));
        }
        out
    };
    let pi = {
        let mut out = Poly::zero(&t);
        for i in 1..=n {
            out.add_assign_ref(&(&fib(&t, Block::Xi, Coord::P(i)) * &fib(&t, Block::Eta, Coord::Q(i))));
            out.add_assign_ref(&-(&fib(&t, Block::Xi, Coord::Q(i)) * &fib(&t, Block::Eta, Coord::P(i))));
        }
        out
    };
    let (xt, et, yt) = (
        fib(&t, Block::Xi, Coord::T),
        fib(&t, Block::Eta, Coord::T),
        fib(&t, Block::Y, Coord::T),
    );
    let mut omega_y = Poly::zero(&t);
    for i in 1..=n {
        omega_y.add_assign_ref(&(&Poly::var(&t, t.p(i)) * &fib(&t, Block::Y, Coord::Q(i))));
        omega_y.add_assign_ref(&-(&Poly::var(&t, t.q(i)) * &fib(&t, Block::Y, Coord::P(i))));
    }
    let expected = [
        (GeneratorName::U1, &spatial_pair(Block::Y, Block::Xi) + &(&yt * &xt)),
        (GeneratorName::U2, &spatial_pair(Block::Y, Block::Eta) + &(&yt * &et)),
        (GeneratorName::U3, (&omega_y - &yt).scale(&rat(1, 2))),
        (GeneratorName::U4, xt.scale(&int(-2))),
        (GeneratorName::U5, et.scale(&int(-2))),
        (
            GeneratorName::L1,
            &(&pi + &(&et * &spatial_euler_pairing(&t, Block::Xi)))
                - &(&xt * &spatial_euler_pairing(&t, Block::Eta)),
        ),
    ];
    for (name, poly) in expected {
        if generator(name, n)?.elem.poly != poly {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Feasible values of `(n+1)ν` for fiber degrees `(k, m, ℓ)`: `−ℓ ..= k+m`.
pub fn feasible_weights(k: u32, m: u32, l: u32) -> Vec<i64> {
    (-(l as i64)..=(k + m) as i64).collect()
}

pub fn nu_from_integral(n: usize, w: i64) -> Rational {
    Rational::new(w.into(), BigInt::from(n + 1))
}

/// Sanity check used by reports: the unit weight `I = 1/(n+1)`.
pub fn unit_weight(n: usize) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(n + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_forms() {
        let t = VarTable::full(1);
        let u4 = generator(GeneratorName::U4, 1).unwrap();
        assert_eq!(u4.elem.poly, fib(&t, Block::Xi, Coord::T).scale(&int(-2)));
        let u3 = generator(GeneratorName::U3, 1).unwrap();
        let expected = (&(&(&Poly::var(&t, t.p(1)) * &fib(&t, Block::Y, Coord::Q(1)))
            - &(&Poly::var(&t, t.q(1)) * &fib(&t, Block::Y, Coord::P(1))))
            - &fib(&t, Block::Y, Coord::T))
            .scale(&rat(1, 2));
        assert_eq!(u3.elem.poly, expected);
        assert_eq!(u3.elem.weight(), rat(-1, 2));
        assert!(weyl_structure_holds(1).unwrap());
        assert!(weyl_structure_holds(2).unwrap());
    }

    #[test]
    fn counting_examples() {
        let z = Rational::zero();
        assert_eq!(count_s1(1, 0, 0, 0, &z, false), 1);
        assert_eq!(count_s1(1, 1, 0, 1, &z, false), 2);
        assert_eq!(count_s1(1, 1, 0, 1, &z, true), 1);
        assert_eq!(count_s1(1, 1, 1, 0, &rat(1, 2), false), 1);
        assert_eq!(count_s1(1, 1, 0, 1, &rat(1, 3), false), 0);
        let b = monomial_basis_classical(1, 0, 0, 1, &rat(-1, 2), false).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].0, [0, 0, 1, 0, 0, 0]);
        let b = monomial_basis_classical(1, 2, 0, 2, &z, true).unwrap();
        assert_eq!(b.iter().map(|x| x.0).collect::<Vec<_>>(), vec![[2, 0, 0, 0, 0, 0]]);
    }

    #[test]
    fn solver_examples() {
        let z = Rational::zero();
        for alg in [Algebra::AffineContact, Algebra::FullSp] {
            let q = InvariantQuery::new(1, 0, 0, 0, z.clone(), alg);
            assert_eq!(invariant_space_dim(&q).unwrap().dimension, 1);
        }
        let q = InvariantQuery::new(1, 1, 0, 1, z.clone(), Algebra::AffineContact).with_bound(2);
        let r = invariant_report(&q).unwrap();
        assert_eq!(r.solver_dim, 2);
        assert!(r.matches && r.classical_spans);
        let q = InvariantQuery::new(1, 1, 0, 1, z, Algebra::FullSp).with_bound(2);
        let r = invariant_report(&q).unwrap();
        assert_eq!(r.solver_dim, 1);
        assert!(r.classical_spans);
    }

    #[test]
    fn affine_invariance_and_t2_breaking() {
        let checks = generator_invariance(1).unwrap();
        for c in &checks {
            let affine = sp_basis(1)
                .unwrap()
                .generators()
                .iter()
                .find(|g| g.label.name() == c.field)
                .unwrap()
                .label
                .is_affine();
            if affine {
                assert!(c.vanishes, "{} under {}", c.generator, c.field);
            }
            if c.field == "t2" {
                let expect = !(c.generator == "u4" || c.generator == "u5");
                assert_eq!(c.vanishes, expect, "{} under t2", c.generator);
            }
        }
    }
}
