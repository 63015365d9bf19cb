//! The invariant operators `i_α` and `X` on symbol modules, their commutation
//! law, the eigenspace decomposition of `R^k_δ`, and the classifier of
//! invariant operators `R^ℓ_δ → R^k_δ`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::json;

use crate::algebra::json::poly_to_json;
use crate::algebra::linalg::{kernel_of_columns, rank};
use crate::algebra::{fmt_rational, int, rat, Block, Coord, DiffOp, Monomial, Poly, Rational, Var, VarTable};
use crate::contact::sp_basis;
use crate::error::{Error, Result};
use crate::invariants::diagonal_eigenvalue;
use crate::symbols::{basis_actions, ActionContext, Module, SymbolElem};

/// `I = 1/(n+1)`.
fn unit(n: usize) -> Rational {
    rat(1, (n + 1) as i64)
}

fn n1(n: usize) -> Rational {
    int((n + 1) as i64)
}

/// The critical weights `C_k = {−p/(2(n+1)) : p = 0..2k−2}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalSet {
    pub k: u32,
    pub n: usize,
    pub members: Vec<Rational>,
}

impl CriticalSet {
    pub fn contains(&self, delta: &Rational) -> bool {
        self.members.contains(delta)
    }

    /// The index `p` with `δ = −p/(2(n+1))`, if critical.
    pub fn index_of(&self, delta: &Rational) -> Option<u32> {
        self.members.iter().position(|m| m == delta).map(|p| p as u32)
    }
}

pub fn critical_set(k: u32, n: usize) -> CriticalSet {
    let members = if k == 0 {
        Vec::new()
    } else {
        (0..=(2 * k - 2))
            .map(|p| rat(-(p as i64), 2 * (n + 1) as i64))
            .collect()
    };
    CriticalSet { k, n, members }
}

/// Fails with [`Error::CriticalWeight`] when `δ ∈ C_k`.
pub fn check_noncritical(delta: &Rational, k: u32, n: usize) -> Result<()> {
    match critical_set(k, n).index_of(delta) {
        Some(p) => Err(Error::CriticalWeight { delta: delta.clone(), k, p }),
        None => Ok(()),
    }
}

/// `r(ℓ, k) = −(ℓ/2)(2(n+1)δ + 2k + ℓ − 1)`.
pub fn commutation_r(l: u32, k: u32, delta: &Rational, n: usize) -> Rational {
    let l_r = int(l as i64);
    let inner = int(2) * n1(n) * delta + int(2 * k as i64 + l as i64 - 1);
    -(l_r * inner) / int(2)
}

/// Operator label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OpLabel {
    IAlpha,
    X,
    /// `X^m ∘ i_α^e`.
    Composite { m: u32, e: u32 },
    Custom(String),
}

impl OpLabel {
    /// `(m, e)` with the operator equal to `X^m ∘ i_α^e`.
    pub fn powers(&self) -> Option<(u32, u32)> {
        match self {
            OpLabel::IAlpha => Some((0, 1)),
            OpLabel::X => Some((1, 0)),
            OpLabel::Composite { m, e } => Some((*m, *e)),
            OpLabel::Custom(_) => None,
        }
    }
}

impl fmt::Display for OpLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpLabel::IAlpha => write!(f, "i_alpha"),
            OpLabel::X => write!(f, "X"),
            OpLabel::Composite { m: 0, e: 0 } => write!(f, "id"),
            OpLabel::Composite { m, e: 0 } => write!(f, "X^{m}"),
            OpLabel::Composite { m: 0, e } => write!(f, "i_alpha^{e}"),
            OpLabel::Composite { m, e } => write!(f, "X^{m}∘i_alpha^{e}"),
            OpLabel::Custom(s) => write!(f, "{s}"),
        }
    }
}

/// A differential operator between two symbol modules over the same `n`.
#[derive(Clone, Debug)]
pub struct ModuleOp {
    pub n: usize,
    pub source: Module,
    pub target: Module,
    pub diffop: DiffOp,
    pub label: OpLabel,
}

impl ModuleOp {
    pub fn apply(&self, s: &SymbolElem) -> Result<SymbolElem> {
        if s.module != self.source || s.n != self.n {
            return Err(Error::ModuleMismatch(format!(
                "{} expects {} but got {}",
                self.label, self.source, s.module
            )));
        }
        let out = self.diffop.apply(&s.poly.lift(self.diffop.table())?);
        let out = out.restrict(&self.target.table(self.n))?;
        SymbolElem::new(out, self.target.clone())
    }

    /// `self ∘ inner`; the inner target must be this operator's source.
    pub fn compose(&self, inner: &ModuleOp) -> Result<ModuleOp> {
        if inner.target != self.source || inner.n != self.n {
            return Err(Error::ModuleMismatch(format!(
                "cannot compose {} (from {}) after {} (into {})",
                self.label, self.source, inner.label, inner.target
            )));
        }
        let label = match (self.label.powers(), inner.label.powers()) {
            // X^a i^b X^c i^d is in normal form when b = 0 or c = 0.
            (Some((a, b)), Some((c, d))) if b == 0 || c == 0 => OpLabel::Composite { m: a + c, e: b + d },
            _ => OpLabel::Custom(format!("{}∘{}", self.label, inner.label)),
        };
        Ok(ModuleOp {
            n: self.n,
            source: inner.source.clone(),
            target: self.target.clone(),
            diffop: self.diffop.compose(&inner.diffop),
            label,
        })
    }

    pub fn identity(n: usize, module: Module) -> ModuleOp {
        let t = module.table(n);
        ModuleOp {
            n,
            source: module.clone(),
            target: module,
            diffop: DiffOp::identity(&t),
            label: OpLabel::Composite { m: 0, e: 0 },
        }
    }
}

/// `½(Σ_j(p_j ∂_{ξ_{q_j}} − q_j ∂_{ξ_{p_j}}) − ∂_{ξ_t})` on `table`.
pub fn i_alpha_diffop(table: &Arc<VarTable>) -> DiffOp {
    let n = table.n();
    let half = rat(1, 2);
    let mut op = DiffOp::partial(table, table.fv(Block::Xi, Coord::T)).scale(&-half.clone());
    for j in 1..=n {
        let p = Poly::var(table, table.p(j)).scale(&half);
        let q = Poly::var(table, table.q(j)).scale(&-half.clone());
        op.add_assign(&DiffOp::vector(p, table.fv(Block::Xi, Coord::Q(j))));
        op.add_assign(&DiffOp::vector(q, table.fv(Block::Xi, Coord::P(j))));
    }
    op
}

/// `Σ_j(ξ_{q_j}∂_{p_j} − ξ_{p_j}∂_{q_j}) + ξ_t E_s − ⟨E_s, ξ_s⟩∂_t + a ξ_t`.
pub fn gen_hamiltonian_diffop(table: &Arc<VarTable>, a: &Rational) -> DiffOp {
    let n = table.n();
    let xi = |c: Coord| Poly::var(table, table.fv(Block::Xi, c));
    let xt = xi(Coord::T);
    let mut es_xi = Poly::zero(table);
    let mut op = DiffOp::multiplication(&xt.scale(a));
    for j in 1..=n {
        let (p, q) = (table.p(j), table.q(j));
        op.add_assign(&DiffOp::vector(xi(Coord::Q(j)), p));
        op.add_assign(&DiffOp::vector(-xi(Coord::P(j)), q));
        op.add_assign(&DiffOp::vector(&xt * &Poly::var(table, p), p));
        op.add_assign(&DiffOp::vector(&xt * &Poly::var(table, q), q));
        es_xi.add_assign_ref(&(&Poly::var(table, p) * &xi(Coord::P(j))));
        es_xi.add_assign_ref(&(&Poly::var(table, q) * &xi(Coord::Q(j))));
    }
    op.add_assign(&DiffOp::vector(-es_xi, table.t()));
    op
}

/// Target module of `i_α`.
fn lower(module: &Module, n: usize) -> Result<Module> {
    match module {
        Module::R { k, delta } if *k > 0 => Ok(Module::r(k - 1, delta.clone())),
        Module::S { k, m, l, nu } if *k > 0 => Ok(Module::s(k - 1, *m, *l, nu - unit(n))),
        _ => Err(Error::InvalidParameter("i_alpha needs fiber degree at least 1".into())),
    }
}

/// Target module of `X`.
fn raise(module: &Module, n: usize) -> Module {
    match module {
        Module::R { k, delta } => Module::r(k + 1, delta.clone()),
        Module::S { k, m, l, nu } => Module::s(k + 1, *m, *l, nu + unit(n)),
    }
}

/// `a = 2(n+1)λ − k`, read off the true weight `λ` of the source.
pub fn hamiltonian_scalar(module: &Module, n: usize) -> Rational {
    int(2) * n1(n) * module.weight(n) - int(module.xi_degree() as i64)
}

pub fn i_alpha_op(n: usize, source: Module) -> Result<ModuleOp> {
    let target = lower(&source, n)?;
    Ok(ModuleOp {
        n,
        diffop: i_alpha_diffop(&source.table(n)),
        source,
        target,
        label: OpLabel::IAlpha,
    })
}

pub fn x_op(n: usize, source: Module) -> ModuleOp {
    let target = raise(&source, n);
    let a = hamiltonian_scalar(&source, n);
    ModuleOp {
        n,
        diffop: gen_hamiltonian_diffop(&source.table(n), &a),
        source,
        target,
        label: OpLabel::X,
    }
}

/// `X^m ∘ i_α^e` starting at `source`, tracking every intermediate weight.
pub fn composite_op(n: usize, source: Module, m: u32, e: u32) -> Result<ModuleOp> {
    let mut op = ModuleOp::identity(n, source);
    for _ in 0..e {
        op = i_alpha_op(n, op.target.clone())?.compose(&op)?;
    }
    for _ in 0..m {
        op = x_op(n, op.target.clone()).compose(&op)?;
    }
    Ok(op)
}

/// `i_α S`; the zero polynomial when `k = 0`.
pub fn i_alpha(s: &SymbolElem) -> Result<SymbolElem> {
    if s.module.xi_degree() == 0 {
        let target = match &s.module {
            Module::R { delta, .. } => Module::r(0, delta.clone()),
            Module::S { m, l, nu, .. } => Module::s(0, *m, *l, nu - unit(s.n)),
        };
        return Ok(SymbolElem::zero(s.n, target));
    }
    i_alpha_op(s.n, s.module.clone())?.apply(s)
}

pub fn gen_hamiltonian(s: &SymbolElem) -> Result<SymbolElem> {
    x_op(s.n, s.module.clone()).apply(s)
}

/// `X^ℓ S`.
pub fn x_power(s: &SymbolElem, l: u32) -> Result<SymbolElem> {
    let mut out = s.clone();
    for _ in 0..l {
        out = gen_hamiltonian(&out)?;
    }
    Ok(out)
}

pub fn i_alpha_power(s: &SymbolElem, l: u32) -> Result<SymbolElem> {
    let mut out = s.clone();
    for _ in 0..l {
        out = i_alpha(&out)?;
    }
    Ok(out)
}

/// `T_0 .. T_k` with `S = Σ X^ℓ T_ℓ` and `i_α T_ℓ = 0`.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub n: usize,
    pub k: u32,
    pub delta: Rational,
    /// `components[ℓ] = T_ℓ ∈ R^{k−ℓ}_δ`.
    pub components: Vec<SymbolElem>,
    /// `X^ℓ T_ℓ ∈ R^k_δ`.
    pub lifted: Vec<SymbolElem>,
}

impl Decomposition {
    pub fn reconstruct(&self) -> Poly {
        let mut out = Poly::zero(&VarTable::with_xi(self.n));
        for l in &self.lifted {
            out.add_assign_ref(&l.poly);
        }
        out
    }
}

/// Triangular peeling from `ℓ = k` down:
/// `T_ℓ = i_α^ℓ(residual) / Π_{i=1..ℓ} r(i, k−ℓ)`, then `residual −= X^ℓ T_ℓ`.
pub fn decompose(s: &SymbolElem) -> Result<Decomposition> {
    let Module::R { k, delta } = &s.module else {
        return Err(Error::ModuleMismatch("decompose acts on R^k_delta".into()));
    };
    let (k, delta, n) = (*k, delta.clone(), s.n);
    check_noncritical(&delta, k, n)?;
    let mut residual = s.clone();
    let mut components = vec![None; k as usize + 1];
    let mut lifted = vec![None; k as usize + 1];
    for l in (0..=k).rev() {
        let mut rho = Rational::one();
        for i in 1..=l {
            rho *= commutation_r(i, k - l, &delta, n);
        }
        if rho.is_zero() {
            // Unreachable off the critical set.
            return Err(Error::Singular(format!("rho vanishes at l={l}")));
        }
        let top = i_alpha_power(&residual, l)?;
        let t = SymbolElem::new(top.poly.scale(&(Rational::one() / rho)), Module::r(k - l, delta.clone()))?;
        let xt = x_power(&t, l)?;
        residual = SymbolElem::new(&residual.poly - &xt.poly, residual.module.clone())?;
        components[l as usize] = Some(t);
        lifted[l as usize] = Some(xt);
    }
    debug_assert!(residual.poly.is_zero());
    Ok(Decomposition {
        n,
        k,
        delta,
        components: components.into_iter().map(Option::unwrap).collect(),
        lifted: lifted.into_iter().map(Option::unwrap).collect(),
    })
}

pub fn decomposition_json(d: &Decomposition, eigenvalues: &[Rational], reconstructed_ok: bool) -> serde_json::Value {
    let comps: Vec<serde_json::Value> = d
        .components
        .iter()
        .zip(&d.lifted)
        .enumerate()
        .map(|(l, (t, xt))| {
            json!({
                "l": l,
                "T": poly_to_json(&t.poly),
                "XlT": poly_to_json(&xt.poly),
                "eigenvalue": fmt_rational(&eigenvalues[l]),
            })
        })
        .collect();
    json!({
        "n": d.n,
        "k": d.k,
        "delta": fmt_rational(&d.delta),
        "components": comps,
        "reconstructed_ok": reconstructed_ok,
    })
}

/// Monomials `x^a ξ^b` with `|a| ≤ base_degree` and `|b| = k`.
pub fn symbol_monomials(table: &Arc<VarTable>, k: u32, base_degree: u32) -> Vec<Monomial> {
    let nv = table.len();
    let base: Vec<Var> = table.coords().map(|c| table.coord(c)).collect();
    let xs = Monomial::all_up_to_degree(nv, &base, base_degree);
    let xis = Monomial::all_of_degree(nv, &table.block_vars(Block::Xi), k);
    let mut out: Vec<Monomial> = xs.iter().flat_map(|a| xis.iter().map(move |b| a.mul(b))).collect();
    out.sort();
    out
}

/// One unknown of the classification ansatz: `x^c ξ^μ ∂_x^γ ∂_ξ^β`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AnsatzTerm {
    pub gamma: Monomial,
    pub beta: Monomial,
    pub mu: Monomial,
    pub coeff: Monomial,
}

impl AnsatzTerm {
    /// Coefficient monomial `x^c ξ^μ` and derivative multi-index `γ + β`.
    fn diffop(&self, table: &Arc<VarTable>) -> DiffOp {
        DiffOp::term(
            Poly::term(table, self.coeff.mul(&self.mu), Rational::one()),
            self.gamma.mul(&self.beta),
        )
    }

    /// Image of `x^a ξ^b` (with `|b| = |β|`), as a single scaled monomial.
    fn apply_monomial(&self, m: &Monomial, base_len: usize) -> Option<(Monomial, Rational)> {
        let ex = m.exps();
        // ∂_ξ^β ξ^b = b! when β = b, else 0 (both of the same total degree).
        if ex[base_len..] != self.beta.exps()[base_len..] {
            return None;
        }
        let mut xe = ex.to_vec();
        xe[base_len..].iter_mut().for_each(|e| *e = 0);
        let xa = Monomial::new(xe);
        let rest = xa.checked_div(&self.gamma)?;
        let scalar = xa.falling_factorial(&self.gamma) * self.beta.falling_factorial(&self.beta);
        Some((rest.mul(&self.coeff).mul(&self.mu), Rational::from_integer(scalar)))
    }
}

/// Equation coefficients of one unknown, keyed by `(generator, test, output monomial)`.
type Column = Vec<((usize, usize, Monomial), Rational)>;

/// Result of [`classify_same_weight`].
#[derive(Clone, Debug)]
pub struct Classification {
    pub n: usize,
    pub l: u32,
    pub k: u32,
    pub delta: Rational,
    pub order_bound: u32,
    pub coeff_degree_bound: u32,
    pub dimension: usize,
    pub predicted: usize,
    pub basis: Vec<ModuleOp>,
    pub predicted_ops: Vec<ModuleOp>,
    pub spans_match: bool,
    pub basis_intertwines: bool,
    pub unknowns: usize,
    pub unknowns_after_prefilter: usize,
}

/// `|{m : max(0, k−ℓ) ≤ m ≤ min(k, M)}|`.
pub fn predicted_count(l: u32, k: u32, order_bound: u32) -> usize {
    let lo = k.saturating_sub(l);
    let hi = k.min(order_bound);
    if hi >= lo {
        (hi - lo + 1) as usize
    } else {
        0
    }
}

/// Evaluation vector of a module operator on a list of test monomials, keyed
/// by `(test index, output monomial)`.
fn evaluation_vector(op: &DiffOp, tests: &[Monomial]) -> Vec<((usize, Monomial), Rational)> {
    let t = op.table();
    let mut out = Vec::new();
    for (i, m) in tests.iter().enumerate() {
        let img = op.apply(&Poly::term(t, m.clone(), Rational::one()));
        for (mm, c) in img.terms() {
            out.push(((i, mm.clone()), c.clone()));
        }
    }
    out
}

fn dense_from_keyed(vectors: &[Vec<((usize, Monomial), Rational)>]) -> (Vec<Vec<Rational>>, usize) {
    let mut index: HashMap<(usize, Monomial), usize> = HashMap::new();
    let mut keys: Vec<(usize, Monomial)> = Vec::new();
    for v in vectors {
        for (k, _) in v {
            if !index.contains_key(k) {
                index.insert(k.clone(), keys.len());
                keys.push(k.clone());
            }
        }
    }
    let rows = vectors
        .iter()
        .map(|v| {
            let mut d = vec![Rational::zero(); keys.len()];
            for (k, c) in v {
                d[index[k]] += c;
            }
            d
        })
        .collect();
    (rows, keys.len())
}

/// Checks `L^{target}_X ∘ T = T ∘ L^{source}_X` for every basis generator on
/// the test monomials.
pub fn intertwines(op: &ModuleOp, tests: &[Monomial]) -> Result<bool> {
    let basis = sp_basis(op.n)?;
    let src = basis_actions(&basis, &ActionContext::new(op.n, op.source.clone()));
    let tgt = basis_actions(&basis, &ActionContext::new(op.n, op.target.clone()));
    let t = op.diffop.table().clone();
    Ok(src.iter().zip(&tgt).all(|(ls, lt)| {
        tests.iter().all(|m| {
            let s = Poly::term(&t, m.clone(), Rational::one());
            lt.apply(&op.diffop.apply(&s)) == op.diffop.apply(&ls.apply(&s))
        })
    }))
}

/// Solves for all invariant operators `R^ℓ_δ → R^k_δ` within the ansatz
/// `Σ c(x) ξ^μ ∂_x^γ ∂_ξ^β` with `|β| = ℓ`, `|μ| = k`, `|γ| ≤ M`,
/// `deg c ≤ D`, and compares with the span of `X^m ∘ i_α^{ℓ+m−k}`.
pub fn classify_same_weight(
    n: usize,
    l: u32,
    k: u32,
    delta: &Rational,
    order_bound: u32,
    coeff_degree_bound: Option<u32>,
) -> Result<Classification> {
    let d_bound = coeff_degree_bound.unwrap_or(order_bound + l + 1);
    let table = VarTable::with_xi(n);
    let nv = table.len();
    let base: Vec<Var> = table.coords().map(|c| table.coord(c)).collect();
    let xi_vars = table.block_vars(Block::Xi);
    let src_mod = Module::r(l, delta.clone());
    let tgt_mod = Module::r(k, delta.clone());
    let basis = sp_basis(n)?;
    let src_ops = basis_actions(&basis, &ActionContext::new(n, src_mod.clone()));
    let tgt_ops = basis_actions(&basis, &ActionContext::new(n, tgt_mod.clone()));

    let gammas = Monomial::all_up_to_degree(nv, &base, order_bound);
    let betas = Monomial::all_of_degree(nv, &xi_vars, l);
    let mus = Monomial::all_of_degree(nv, &xi_vars, k);
    let coeffs = Monomial::all_up_to_degree(nv, &base, d_bound);
    let mut unknowns = Vec::new();
    for gamma in &gammas {
        for beta in &betas {
            for mu in &mus {
                for c in &coeffs {
                    unknowns.push(AnsatzTerm {
                        gamma: gamma.clone(),
                        beta: beta.clone(),
                        mu: mu.clone(),
                        coeff: c.clone(),
                    });
                }
            }
        }
    }
    let total = unknowns.len();

    // Diagonal generators force the total weight of each unknown to vanish.
    let mut dynamic = Vec::new();
    for (ls, lt) in src_ops.iter().zip(&tgt_ops) {
        match (ls.diagonal_weights(), lt.diagonal_weights()) {
            (Some(ws), Some(wt)) => {
                let shift = &wt.1 - &ws.1;
                unknowns.retain(|u| {
                    let up = diagonal_eigenvalue(&(wt.0.clone(), Rational::zero()), &u.coeff.mul(&u.mu));
                    let down = diagonal_eigenvalue(&(ws.0.clone(), Rational::zero()), &u.gamma.mul(&u.beta));
                    (up - down + &shift).is_zero()
                });
            }
            _ => dynamic.push((ls, lt)),
        }
    }
    unknowns.sort();
    let kept = unknowns.len();

    let tests = symbol_monomials(&table, l, order_bound + 1);
    let base_len = table.block_len();
    // L^source applied to each test monomial, per generator.
    let src_images: Vec<Vec<Poly>> = dynamic
        .iter()
        .map(|(ls, _)| {
            tests
                .par_iter()
                .map(|m| ls.apply(&Poly::term(&table, m.clone(), Rational::one())))
                .collect()
        })
        .collect();

    let columns: Vec<Column> = unknowns
        .par_iter()
        .map(|u| {
            let mut col = Vec::new();
            for (g, (_, lt)) in dynamic.iter().enumerate() {
                for (ti, m) in tests.iter().enumerate() {
                    let mut e = Poly::zero(&table);
                    if let Some((mm, c)) = u.apply_monomial(m, base_len) {
                        e.add_assign_ref(&lt.apply(&Poly::term(&table, mm, c)));
                    }
                    for (sm, sc) in src_images[g][ti].terms() {
                        if let Some((mm, c)) = u.apply_monomial(sm, base_len) {
                            e.add_term(mm, -(c * sc));
                        }
                    }
                    for (mm, c) in e.terms() {
                        col.push(((g, ti, mm.clone()), c.clone()));
                    }
                }
            }
            col
        })
        .collect();
    let kernel = kernel_of_columns(&columns);

    let basis_ops: Vec<ModuleOp> = kernel
        .iter()
        .map(|v| {
            let mut op = DiffOp::zero(&table);
            for (u, c) in unknowns.iter().zip(v) {
                if !c.is_zero() {
                    op.add_scaled(&u.diffop(&table), c);
                }
            }
            ModuleOp {
                n,
                source: src_mod.clone(),
                target: tgt_mod.clone(),
                diffop: op,
                label: OpLabel::Custom("kernel".into()),
            }
        })
        .collect();

    let lo = k.saturating_sub(l);
    let hi = k.min(order_bound);
    let mut predicted_ops = Vec::new();
    if hi >= lo {
        for m in lo..=hi {
            predicted_ops.push(composite_op(n, src_mod.clone(), m, l + m - k)?);
        }
    }
    let eval_tests = symbol_monomials(&table, l, order_bound + 1);
    let ev_basis: Vec<_> = basis_ops.par_iter().map(|o| evaluation_vector(&o.diffop, &eval_tests)).collect();
    let ev_pred: Vec<_> = predicted_ops.par_iter().map(|o| evaluation_vector(&o.diffop, &eval_tests)).collect();
    let all: Vec<_> = ev_basis.iter().chain(&ev_pred).cloned().collect();
    let (dense, ncols) = dense_from_keyed(&all);
    let (db, dp) = dense.split_at(ev_basis.len());
    let rb = rank(db, ncols);
    let spans_match = rb == rank(dp, ncols) && rb == rank(&dense, ncols);
    let basis_intertwines = basis_ops
        .par_iter()
        .map(|o| intertwines(o, &tests))
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .all(|b| b);

    Ok(Classification {
        n,
        l,
        k,
        delta: delta.clone(),
        order_bound,
        coeff_degree_bound: d_bound,
        dimension: basis_ops.len(),
        predicted: predicted_count(l, k, order_bound),
        basis: basis_ops,
        predicted_ops,
        spans_match,
        basis_intertwines,
        unknowns: total,
        unknowns_after_prefilter: kept,
    })
}

pub fn classification_json(c: &Classification) -> serde_json::Value {
    json!({
        "n": c.n,
        "l": c.l,
        "k": c.k,
        "delta": fmt_rational(&c.delta),
        "order_bound": c.order_bound,
        "coeff_degree_bound": c.coeff_degree_bound,
        "dimension": c.dimension,
        "predicted": c.predicted,
        "predicted_basis": c.predicted_ops.iter().map(|o| o.label.to_string()).collect::<Vec<_>>(),
        "spans_match": c.spans_match,
        "basis_intertwines": c.basis_intertwines,
        "unknowns": c.unknowns,
        "unknowns_after_prefilter": c.unknowns_after_prefilter,
    })
}

/// Helper for tests and reports: the scalar `2(n+1)δ + k` of `X` on `R^k_δ`.
pub fn r_scalar(n: usize, k: u32, delta: &Rational) -> Rational {
    int(2) * n1(n) * delta + Rational::from_integer(BigInt::from(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xi(t: &Arc<VarTable>, c: Coord) -> Poly {
        Poly::var(t, t.fv(Block::Xi, c))
    }

    #[test]
    fn i_alpha_examples() {
        let d = rat(1, 3);
        let t = VarTable::with_xi(1);
        let s = SymbolElem::new(xi(&t, Coord::T), Module::r(1, d.clone())).unwrap();
        assert_eq!(i_alpha(&s).unwrap().poly, Poly::constant(&t, rat(-1, 2)));
        let s = SymbolElem::new(&Poly::var(&t, t.p(1)) * &xi(&t, Coord::Q(1)), Module::r(1, d.clone())).unwrap();
        assert_eq!(i_alpha(&s).unwrap().poly, Poly::var(&t, t.p(1)).pow(2).scale(&rat(1, 2)));
        let s = SymbolElem::new(Poly::var(&t, t.t()), Module::r(0, d)).unwrap();
        assert!(i_alpha(&s).unwrap().poly.is_zero());
    }

    #[test]
    fn gen_hamiltonian_examples() {
        let n = 1;
        let d = rat(2, 7);
        let t = VarTable::with_xi(n);
        let one = SymbolElem::new(Poly::one(&t), Module::r(0, d.clone())).unwrap();
        assert_eq!(gen_hamiltonian(&one).unwrap().poly, xi(&t, Coord::T).scale(&(int(4) * &d)));
        let s0 = SymbolElem::new(Poly::one(&VarTable::full(n)), Module::s(0, 0, 0, Rational::zero())).unwrap();
        assert!(gen_hamiltonian(&s0).unwrap().poly.is_zero());
        // ξ_t in S^1_δ is R^1_{δ - 1/2} for n = 1.
        let s1 = SymbolElem::new(xi(&t, Coord::T), Module::r(1, &d - rat(1, 2))).unwrap();
        let expected = xi(&t, Coord::T).pow(2).scale(&(int(4) * &d - int(1)));
        assert_eq!(gen_hamiltonian(&s1).unwrap().poly, expected);
    }

    #[test]
    fn commutation_examples() {
        assert!(commutation_r(0, 3, &rat(1, 3), 1).is_zero());
        assert_eq!(commutation_r(1, 0, &int(1), 1), int(-2));
        let d = rat(3, 5);
        let t = VarTable::with_xi(1);
        let one = SymbolElem::new(Poly::one(&t), Module::r(0, d.clone())).unwrap();
        let lhs = i_alpha(&gen_hamiltonian(&one).unwrap()).unwrap();
        assert_eq!(lhs.poly, Poly::constant(&t, commutation_r(1, 0, &d, 1)));
    }

    #[test]
    fn critical_sets() {
        assert!(critical_set(0, 1).members.is_empty());
        assert_eq!(critical_set(2, 1).members, vec![int(0), rat(-1, 4), rat(-1, 2)]);
        assert_eq!(critical_set(1, 2).members, vec![int(0)]);
        assert!(matches!(check_noncritical(&rat(-1, 4), 2, 1), Err(Error::CriticalWeight { p: 1, .. })));
    }

    #[test]
    fn decompose_examples() {
        let n = 1;
        let d = int(1);
        let t = VarTable::with_xi(n);
        let s = SymbolElem::new(xi(&t, Coord::T), Module::r(1, d)).unwrap();
        let dec = decompose(&s).unwrap();
        assert!(dec.components[0].poly.is_zero());
        assert_eq!(dec.components[1].poly, Poly::constant(&t, rat(1, 4)));
        assert_eq!(dec.lifted[1].poly, s.poly);
        let q = SymbolElem::new(&Poly::var(&t, t.p(1)) * &xi(&t, Coord::T) + xi(&t, Coord::Q(1)), Module::r(1, rat(1, 3)))
            .unwrap();
        let dec = decompose(&q).unwrap();
        assert_eq!(dec.components[0].poly, q.poly);
        assert!(dec.components[1].poly.is_zero());
        let bad = SymbolElem::new(xi(&t, Coord::T), Module::r(1, int(0))).unwrap();
        assert!(matches!(decompose(&bad), Err(Error::CriticalWeight { p: 0, .. })));
    }

    #[test]
    fn module_op_bookkeeping() {
        let n = 1;
        let m = Module::r(1, rat(1, 3));
        let x = x_op(n, m.clone());
        let ia = i_alpha_op(n, m.clone()).unwrap();
        assert!(ia.compose(&ia).is_err());
        assert!(x.compose(&ia).is_err());
        let ok = x_op(n, Module::r(0, rat(1, 3))).compose(&ia).unwrap();
        assert_eq!(ok.label, OpLabel::Composite { m: 1, e: 1 });
        assert_eq!(ok.target, m);
        let c = composite_op(n, Module::r(2, rat(1, 3)), 2, 2).unwrap();
        assert_eq!(c.label, OpLabel::Composite { m: 2, e: 2 });
        assert_eq!(c.label.to_string(), "X^2∘i_alpha^2");
    }

    #[test]
    fn small_classifications() {
        let d = rat(1, 3);
        let c = classify_same_weight(1, 1, 1, &d, 1, None).unwrap();
        assert_eq!((c.dimension, c.predicted), (2, 2));
        assert!(c.spans_match && c.basis_intertwines);
        let c = classify_same_weight(1, 0, 1, &d, 1, None).unwrap();
        assert_eq!((c.dimension, c.predicted), (1, 1));
        assert!(c.spans_match);
        let c = classify_same_weight(1, 2, 0, &d, 0, None).unwrap();
        assert_eq!((c.dimension, c.predicted), (1, 1));
        assert!(c.spans_match);
    }
}
