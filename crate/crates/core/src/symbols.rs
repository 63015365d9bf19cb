//! Density-weighted symbol modules and the Lie derivative of vector fields on
//! them.
//!
//! `R^k_δ` holds polynomials homogeneous of degree `k` in `ξ`, carrying true
//! density weight `δ + k/(n+1)`. `S^{km}_{ℓ;ν}` holds polynomials of degrees
//! `(k, m, ℓ)` in `(ξ, η, Y)` with weight `ν`. The weight is carried by the
//! module descriptor and never inferred from the polynomial.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::algebra::json::PolyJson;
use crate::algebra::rational::serde_rational;
use crate::algebra::{fmt_rational, Block, Coord, DiffOp, Poly, Rational, Var, VarTable};
use crate::contact::{SpBasis, VField};
use crate::error::{Error, Result};

/// Module descriptor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "module")]
pub enum Module {
    R {
        k: u32,
        #[serde(with = "serde_rational")]
        delta: Rational,
    },
    S {
        k: u32,
        m: u32,
        l: u32,
        #[serde(with = "serde_rational")]
        nu: Rational,
    },
}

impl Module {
    pub fn r(k: u32, delta: Rational) -> Module {
        Module::R { k, delta }
    }

    pub fn s(k: u32, m: u32, l: u32, nu: Rational) -> Module {
        Module::S { k, m, l, nu }
    }

    /// `R^k_δ` tables carry `ξ` only; `S` tables carry all three blocks so that
    /// products of invariants live in one ring.
    pub fn table(&self, n: usize) -> Arc<VarTable> {
        match self {
            Module::R { .. } => VarTable::with_xi(n),
            Module::S { .. } => VarTable::full(n),
        }
    }

    /// True density weight of the underlying bundle.
    pub fn weight(&self, n: usize) -> Rational {
        match self {
            Module::R { k, delta } => delta + Rational::new((*k).into(), ((n + 1) as i64).into()),
            Module::S { nu, .. } => nu.clone(),
        }
    }

    /// Declared degree per fiber block.
    pub fn degrees(&self) -> Vec<(Block, u32)> {
        match self {
            Module::R { k, .. } => vec![(Block::Xi, *k)],
            Module::S { k, m, l, .. } => vec![(Block::Xi, *k), (Block::Eta, *m), (Block::Y, *l)],
        }
    }

    pub fn xi_degree(&self) -> u32 {
        match self {
            Module::R { k, .. } | Module::S { k, .. } => *k,
        }
    }
}

impl fmt::Display for Module {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Module::R { k, delta } => write!(f, "R^{k}_{}", fmt_rational(delta)),
            Module::S { k, m, l, nu } => write!(f, "S^({k},{m})_({l};{})", fmt_rational(nu)),
        }
    }
}

/// `n` together with a module descriptor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ActionContext {
    pub n: usize,
    pub module: Module,
}

impl ActionContext {
    pub fn new(n: usize, module: Module) -> ActionContext {
        ActionContext { n, module }
    }

    pub fn table(&self) -> Arc<VarTable> {
        self.module.table(self.n)
    }

    pub fn weight(&self) -> Rational {
        self.module.weight(self.n)
    }
}

/// An element of a symbol module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolElem {
    pub poly: Poly,
    pub n: usize,
    pub module: Module,
}

impl SymbolElem {
    /// Checks the table and the declared homogeneity. A polynomial over a
    /// smaller table is lifted first.
    pub fn new(poly: Poly, module: Module) -> Result<SymbolElem> {
        let n = poly.table().n();
        let table = module.table(n);
        let poly = poly.lift(&table).map_err(|_| {
            Error::ModuleMismatch(format!("polynomial over {} is not in {module}", poly.table()))
        })?;
        for (b, d) in module.degrees() {
            poly.check_homogeneous(b, d)?;
        }
        Ok(SymbolElem { poly, n, module })
    }

    pub fn zero(n: usize, module: Module) -> SymbolElem {
        SymbolElem { poly: Poly::zero(&module.table(n)), n, module }
    }

    pub fn context(&self) -> ActionContext {
        ActionContext::new(self.n, self.module.clone())
    }

    pub fn weight(&self) -> Rational {
        self.module.weight(self.n)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut header = serde_json::to_value(&self.module).expect("serializable");
        header["poly"] = serde_json::to_value(PolyJson::from_poly(&self.poly)).expect("serializable");
        header
    }

    pub fn from_json(v: &serde_json::Value) -> Result<SymbolElem> {
        let module: Module =
            serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let pj: PolyJson = serde_json::from_value(v["poly"].clone())
            .map_err(|e| Error::Parse(e.to_string()))?;
        let table = module.table(pj.n);
        SymbolElem::new(pj.to_poly_in(&table)?, module)
    }
}

fn check_field(x: &VField, table: &VarTable) -> Result<()> {
    if x.n() != table.n() {
        return Err(Error::ModuleMismatch(format!(
            "field on n={} cannot act on {}",
            x.n(),
            table
        )));
    }
    Ok(())
}

/// Lie derivative on a symbol, computed directly from
/// `L_X Q = X(Q) − ∂_jX^i ξ_i ∂_{ξ_j}Q − ∂_jX^i η_i ∂_{η_j}Q
///        + ∂_jX^i Y_j ∂_{Y_i}Q + w (div X) Q`.
pub fn lie_action_symbol(x: &VField, s: &SymbolElem) -> Result<SymbolElem> {
    let table = s.poly.table().clone();
    check_field(x, &table)?;
    let n = table.n();
    let comps = x.components_in(&table);
    let mut out = x.apply(&s.poly);
    let dim = table.block_len();
    for (i, comp) in comps.iter().enumerate().take(dim) {
        for j in 0..dim {
            let dji = comp.diff(Var(j));
            if dji.is_zero() {
                continue;
            }
            let (ci, cj) = (Coord::from_offset(i, n), Coord::from_offset(j, n));
            for &b in table.blocks() {
                let (vi, vj) = (table.fv(b, ci), table.fv(b, cj));
                let term = match b {
                    Block::Xi | Block::Eta => {
                        -(&(&dji * &Poly::var(&table, vi)) * &s.poly.diff(vj))
                    }
                    Block::Y => &(&dji * &Poly::var(&table, vj)) * &s.poly.diff(vi),
                };
                out.add_assign_ref(&term);
            }
        }
    }
    let div = x.divergence().lift(&table)?;
    out.add_assign_ref(&(&div * &s.poly).scale(&s.weight()));
    Ok(SymbolElem { poly: out, n: s.n, module: s.module.clone() })
}

/// The same action packaged as a differential operator on the module's table.
pub fn lie_action_as_diffop(x: &VField, ctx: &ActionContext) -> DiffOp {
    let table = ctx.table();
    let n = ctx.n;
    let comps = x.components_in(&table);
    let mut op = x.as_diffop(&table);
    let dim = table.block_len();
    for (i, comp) in comps.iter().enumerate().take(dim) {
        for j in 0..dim {
            let dji = comp.diff(Var(j));
            if dji.is_zero() {
                continue;
            }
            let (ci, cj) = (Coord::from_offset(i, n), Coord::from_offset(j, n));
            for &b in table.blocks() {
                let (vi, vj) = (table.fv(b, ci), table.fv(b, cj));
                let term = match b {
                    Block::Xi | Block::Eta => DiffOp::vector(-(&dji * &Poly::var(&table, vi)), vj),
                    Block::Y => DiffOp::vector(&dji * &Poly::var(&table, vj), vi),
                };
                op.add_assign(&term);
            }
        }
    }
    let div = x.divergence().lift(&table).expect("same n");
    op.add_assign(&DiffOp::multiplication(&div.scale(&ctx.weight())));
    op
}

/// Lie actions of every basis generator on one module, in basis order.
pub fn basis_actions(basis: &SpBasis, ctx: &ActionContext) -> Vec<DiffOp> {
    basis
        .generators()
        .par_iter()
        .map(|g| lie_action_as_diffop(&g.field, ctx))
        .collect()
}

/// `L^λ_X f = X(f) + λ f div X` on densities.
pub fn density_action(x: &VField, f: &Poly, lambda: &Rational) -> Result<Poly> {
    check_field(x, f.table())?;
    if let Some(v) = f.first_fiber_var() {
        return Err(Error::FiberVariable(f.table().name(v)));
    }
    let div = x.divergence().lift(f.table())?;
    Ok(&x.apply(f) + &(&div * f).scale(lambda))
}

/// Euler field of the base `Σ x_i ∂_{x_i}` as an operator on `table`.
pub fn euler_op(table: &Arc<VarTable>) -> DiffOp {
    let vars: Vec<Var> = table.coords().map(|c| table.coord(c)).collect();
    crate::contact::euler_on(table, &vars)
}

/// Spatial Euler field `E_s`.
pub fn euler_spatial_op(table: &Arc<VarTable>) -> DiffOp {
    let vars: Vec<Var> = table
        .coords()
        .filter(|c| c.is_spatial())
        .map(|c| table.coord(c))
        .collect();
    crate::contact::euler_on(table, &vars)
}

/// Fiber Euler field `E_ξ` of a block.
pub fn euler_fiber_op(table: &Arc<VarTable>, block: Block) -> DiffOp {
    crate::contact::euler_on(table, &table.block_vars(block))
}

/// Spatial part `E_{ξ_s}` of the fiber Euler field.
pub fn euler_fiber_spatial_op(table: &Arc<VarTable>, block: Block) -> DiffOp {
    let vars: Vec<Var> = table
        .coords()
        .filter(|c| c.is_spatial())
        .map(|c| table.fv(block, c))
        .collect();
    crate::contact::euler_on(table, &vars)
}

/// The contraction `E(ξ) = Σ x_i ξ_i` of the Euler field with a fiber block.
pub fn euler_contraction(table: &Arc<VarTable>, block: Block, spatial_only: bool) -> Poly {
    let mut out = Poly::zero(table);
    for c in table.coords() {
        if spatial_only && !c.is_spatial() {
            continue;
        }
        out.add_assign_ref(&(&Poly::var(table, table.coord(c)) * &Poly::var(table, table.fv(block, c))));
    }
    out
}

/// Report helper: a symbol with its module header.
pub fn symbol_report(s: &SymbolElem) -> serde_json::Value {
    json!({"module": s.module.to_string(), "poly": s.poly.to_string()})
}

/// Weight bookkeeping helper used by reports: `(n+1)δ + k`.
pub fn shifted_weight(n: usize, k: u32, delta: &Rational) -> Rational {
    delta * Rational::from_integer(((n + 1) as i64).into()) + Rational::from_integer(k.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, rat};
    use crate::contact::{sp_basis, SpLabel};

    fn xi(t: &Arc<VarTable>, c: Coord) -> Poly {
        Poly::var(t, t.fv(Block::Xi, c))
    }

    #[test]
    fn reeb_kills_t_free_symbols() {
        let m = Module::r(1, rat(1, 3));
        let t = m.table(1);
        let s = SymbolElem::new(&Poly::var(&t, t.p(1)) * &xi(&t, Coord::Q(1)), m).unwrap();
        assert!(lie_action_symbol(&VField::reeb(1), &s).unwrap().poly.is_zero());
    }

    #[test]
    fn modified_euler_on_xi_t() {
        let d = rat(2, 5);
        let m = Module::r(1, d.clone());
        let t = m.table(1);
        let s = SymbolElem::new(xi(&t, Coord::T), m).unwrap();
        let out = lie_action_symbol(&SpLabel::T.closed_form_field(1), &s).unwrap();
        assert_eq!(out.poly, xi(&t, Coord::T).scale(&(int(-4) * d)));
    }

    #[test]
    fn transfer_term() {
        let m = Module::r(1, rat(7, 3));
        let t = m.table(1);
        let s = SymbolElem::new(xi(&t, Coord::P(1)), m).unwrap();
        let out = lie_action_symbol(&SpLabel::P(1).closed_form_field(1), &s).unwrap();
        assert_eq!(out.poly, xi(&t, Coord::T));
    }

    #[test]
    fn diffop_matches_direct_action() {
        let b = sp_basis(1).unwrap();
        let ctx = ActionContext::new(1, Module::s(1, 1, 1, rat(-1, 2)));
        let t = ctx.table();
        let y = |c| Poly::var(&t, t.fv(Block::Y, c));
        let eta = |c| Poly::var(&t, t.fv(Block::Eta, c));
        let p = Poly::var(&t, t.p(1));
        let tt = Poly::var(&t, t.t());
        let s = &(&(&(&p * &tt) * &xi(&t, Coord::T)) * &eta(Coord::Q(1))) * &y(Coord::P(1));
        let s = &s + &(&(&xi(&t, Coord::P(1)) * &eta(Coord::T)) * &y(Coord::T));
        let elem = SymbolElem::new(s, ctx.module.clone()).unwrap();
        for g in b.generators() {
            let op = lie_action_as_diffop(&g.field, &ctx);
            assert_eq!(op.apply(&elem.poly), lie_action_symbol(&g.field, &elem).unwrap().poly);
        }
    }

    #[test]
    fn t_squared_action_matches_display() {
        let n = 1;
        let d = rat(1, 3);
        let k = 2u32;
        let ctx = ActionContext::new(n, Module::r(k, d.clone()));
        let t = ctx.table();
        let tt = Poly::var(&t, t.t());
        let op = lie_action_as_diffop(&SpLabel::T2.closed_form_field(n), &ctx);
        let mut expected = DiffOp::multiplication(&tt.scale(&int(-2))).compose(&euler_op(&t));
        expected.add_assign(&DiffOp::multiplication(&tt.scale(&int(2))).compose(&euler_fiber_op(&t, Block::Xi)));
        expected.add_assign(&DiffOp::vector(
            euler_contraction(&t, Block::Xi, false).scale(&int(2)),
            t.fv(Block::Xi, Coord::T),
        ));
        let c = shifted_weight(n, k, &d) * int(-4);
        expected.add_assign(&DiffOp::multiplication(&tt.scale(&c)));
        assert_eq!(op, expected);
    }

    #[test]
    fn density_examples() {
        let t = VarTable::base(1);
        let tt = Poly::var(&t, t.t());
        let dt = VField::partial(1, Coord::T, int(1));
        assert_eq!(density_action(&dt, &tt, &rat(5, 7)).unwrap(), Poly::one(&t));
        let xt = SpLabel::T.closed_form_field(1);
        assert_eq!(density_action(&xt, &Poly::one(&t), &rat(-1, 2)).unwrap(), Poly::constant(&t, int(2)));
    }

    #[test]
    fn homogeneity_enforced() {
        let m = Module::r(2, int(0));
        let t = m.table(1);
        assert!(SymbolElem::new(xi(&t, Coord::T), m).is_err());
    }

    #[test]
    fn json_round_trip() {
        let m = Module::s(1, 0, 1, rat(-1, 2));
        let t = m.table(1);
        let s = SymbolElem::new(&xi(&t, Coord::T) * &Poly::var(&t, t.fv(Block::Y, Coord::Q(1))), m).unwrap();
        let v = s.to_json();
        assert_eq!(v["module"], "S");
        assert_eq!(v["nu"], "-1/2");
        assert_eq!(SymbolElem::from_json(&v).unwrap(), s);
    }
}
