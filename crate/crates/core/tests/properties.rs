use std::sync::Arc;

use proptest::prelude::*;

use pcontact::algebra::json::{poly_from_json_str, poly_from_text, PolyJson};
use pcontact::algebra::{fmt_rational, parse_rational, rat, DiffOp, Monomial, Poly, Rational, VarTable};
use pcontact::casimir::eigenvalue;
use pcontact::contact::{contact_hamiltonian, lagrange_bracket, sp_basis};
use pcontact::diophantine::{admissible_pairs, relation_r, relation_r_block, relation_rprime, DioInstance, RELATION_SCALE};
use pcontact::equivariant::{critical_set, decompose, gen_hamiltonian, i_alpha};
use pcontact::symbols::{lie_action_symbol, Module, SymbolElem};

fn rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=6).prop_map(|(a, b)| rat(a, b))
}

fn poly_in(table: Arc<VarTable>, max_deg: u16, terms: usize) -> impl Strategy<Value = Poly> {
    let nv = table.len();
    prop::collection::vec((prop::collection::vec(0..=max_deg, nv), rational()), 0..=terms).prop_map(move |ts| {
        let mut p = Poly::zero(&table);
        for (e, c) in ts {
            let m = Monomial::new(e);
            if m.degree() <= max_deg as u32 {
                p.add_term(m, c);
            }
        }
        p
    })
}

fn base_poly(n: usize) -> impl Strategy<Value = Poly> {
    poly_in(VarTable::base(n), 2, 4)
}

/// Element of `R^k_δ` with base degree at most 2.
fn symbol(n: usize, k: u32, delta: Rational) -> impl Strategy<Value = SymbolElem> {
    let t = VarTable::with_xi(n);
    let family = pcontact::equivariant::symbol_monomials(&t, k, 2);
    prop::collection::vec((0..family.len(), rational()), 1..=5).prop_map(move |ts| {
        let mut p = Poly::zero(&t);
        for (i, c) in ts {
            p.add_term(family[i].clone(), c);
        }
        SymbolElem::new(p, Module::r(k, delta.clone())).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rational_text_round_trip(r in rational()) {
        prop_assert_eq!(parse_rational(&fmt_rational(&r)).unwrap(), r);
    }

    #[test]
    fn poly_ring_laws(a in poly_in(VarTable::with_xi(1), 3, 4), b in poly_in(VarTable::with_xi(1), 3, 4), c in poly_in(VarTable::with_xi(1), 3, 4)) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn poly_serialization_round_trip(p in poly_in(VarTable::with_xi(2), 3, 5)) {
        let t = p.table().clone();
        prop_assert_eq!(poly_from_text(&t, &p.to_string()).unwrap(), p.clone());
        let s = serde_json::to_string(&PolyJson::from_poly(&p)).unwrap();
        prop_assert_eq!(poly_from_json_str(&s).unwrap(), p);
    }

    #[test]
    fn leibniz_rule(a in base_poly(1), b in base_poly(1), v in 0usize..3) {
        let v = pcontact::algebra::Var(v);
        prop_assert_eq!((&a * &b).diff(v), &(&a.diff(v) * &b) + &(&a * &b.diff(v)));
    }

    #[test]
    fn composition_is_application(a in poly_in(VarTable::base(1), 2, 3), b in poly_in(VarTable::base(1), 2, 3), f in poly_in(VarTable::base(1), 4, 5)) {
        let t = VarTable::base(1);
        let x = DiffOp::vector(a, t.p(1)).add(&DiffOp::vector(b.clone(), t.t()));
        let y = DiffOp::vector(b, t.q(1)).compose(&DiffOp::partial(&t, t.p(1)));
        prop_assert_eq!(x.compose(&y).apply(&f), x.apply(&y.apply(&f)));
    }

    #[test]
    fn bracket_antisymmetric_and_morphism(h in base_poly(1), g in base_poly(1)) {
        let hg = lagrange_bracket(&h, &g).unwrap();
        prop_assert_eq!(hg.clone(), -lagrange_bracket(&g, &h).unwrap());
        let lhs = contact_hamiltonian(&hg).unwrap();
        let rhs = contact_hamiltonian(&h).unwrap().bracket(&contact_hamiltonian(&g).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bracket_jacobi(a in base_poly(1), b in base_poly(1), c in base_poly(1)) {
        let br = |x: &Poly, y: &Poly| lagrange_bracket(x, y).unwrap();
        let sum = &(&br(&a, &br(&b, &c)) + &br(&b, &br(&c, &a))) + &br(&c, &br(&a, &b));
        prop_assert!(sum.is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn action_is_a_representation(s in symbol(1, 2, rat(1, 3)), i in 0usize..10, j in 0usize..10) {
        let basis = sp_basis(1).unwrap();
        let (x, y) = (&basis.generators()[i].field, &basis.generators()[j].field);
        let lxy = lie_action_symbol(x, &lie_action_symbol(y, &s).unwrap()).unwrap();
        let lyx = lie_action_symbol(y, &lie_action_symbol(x, &s).unwrap()).unwrap();
        let lbr = lie_action_symbol(&x.bracket(y), &s).unwrap();
        prop_assert_eq!(&lxy.poly - &lyx.poly, lbr.poly);
    }

    #[test]
    fn invariant_operators_commute_with_action(s in symbol(1, 2, rat(-5, 7)), i in 0usize..10) {
        let basis = sp_basis(1).unwrap();
        let x = &basis.generators()[i].field;
        let lx = |e: &SymbolElem| lie_action_symbol(x, e).unwrap();
        prop_assert_eq!(i_alpha(&lx(&s)).unwrap().poly, lx(&i_alpha(&s).unwrap()).poly);
        prop_assert_eq!(gen_hamiltonian(&lx(&s)).unwrap().poly, lx(&gen_hamiltonian(&s).unwrap()).poly);
    }

    #[test]
    fn decomposition_reconstructs(s in rational()
        .prop_filter("non-critical", |d| !critical_set(2, 1).contains(d))
        .prop_flat_map(|d| symbol(1, 2, d)))
    {
        let dec = decompose(&s).unwrap();
        prop_assert_eq!(dec.reconstruct(), s.poly);
        for t in &dec.components {
            prop_assert!(i_alpha(t).unwrap().poly.is_zero());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn relation_is_scaled_eigenvalue_gap(k in 0u32..5, kp in 0u32..5, lf in 0u32..5, lpf in 0u32..5, d in rational(), dp in rational(), n in 1usize..3) {
        let (l, lp) = (lf % (k + 1), lpf % (kp + 1));
        let gap = eigenvalue(n, k, l, &d).unwrap() - eigenvalue(n, kp, lp, &dp).unwrap();
        let scale = Rational::from_integer((RELATION_SCALE * (n as i64 + 2)).into());
        prop_assert_eq!(relation_r(n, k, kp, l, lp, &d, &dp), gap * scale);
    }

    #[test]
    fn admissible_pairs_symmetric(k in 0u32..5, kp in 0u32..5, d in rational(), dp in rational()) {
        let (a, b) = (admissible_pairs(1, k, kp, &d, &dp), admissible_pairs(1, kp, k, &dp, &d));
        prop_assert_eq!(a.is_ok(), b.is_ok());
        if let (Ok(a), Ok(b)) = (a, b) {
            let mut swapped: Vec<(u32, u32)> = b.pairs.iter().map(|&(x, y)| (y, x)).collect();
            swapped.sort();
            prop_assert_eq!(a.pairs, swapped);
            prop_assert!(a.injective && a.functional);
        }
    }

    #[test]
    fn rprime_is_difference_of_relations(
        k in 0u32..5, kp in 0u32..5, d in rational(), dp in rational(),
        raw in prop::collection::vec((0u32..5, 0u32..5), 2..6),
    ) {
        let blocks: Vec<(u32, u32)> = raw.iter().map(|&(a, b)| (a % (k + 1), b % (kp + 1))).collect();
        let inst = DioInstance { n: 1, k, kp, delta: d, deltap: dp, blocks };
        for j in 1..inst.blocks.len() {
            prop_assert_eq!(relation_rprime(&inst, j).unwrap(), relation_r_block(&inst, 0) - relation_r_block(&inst, j));
        }
    }
}
