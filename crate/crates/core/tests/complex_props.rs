//! Complex queries against brute-force set computations.

use std::collections::BTreeSet;

use proptest::prelude::*;

use simpers::complex::{SimplicialComplex, VertexMap};
use simpers::simplex::{Simplex, VertexId};

fn complex_from(gens: &[Vec<VertexId>]) -> SimplicialComplex {
    let mut k = SimplicialComplex::with_max_dim(4);
    for g in gens {
        if let Ok(s) = Simplex::new(g.iter().copied()) {
            k.insert_with_faces(&s).unwrap();
        }
    }
    k
}

fn arb_complex() -> impl Strategy<Value = SimplicialComplex> {
    prop::collection::vec(prop::collection::btree_set(0u32..7, 1..=4), 1..8).prop_map(|gens| {
        complex_from(
            &gens
                .into_iter()
                .map(|s| s.into_iter().collect())
                .collect::<Vec<_>>(),
        )
    })
}

fn all(k: &SimplicialComplex) -> BTreeSet<Simplex> {
    k.iter().cloned().collect()
}

fn star_brute(k: &SimplicialComplex, xs: &[Simplex]) -> BTreeSet<Simplex> {
    all(k)
        .into_iter()
        .filter(|s| xs.iter().any(|x| x.is_face_of(s)))
        .collect()
}

fn closure_brute(xs: &BTreeSet<Simplex>) -> BTreeSet<Simplex> {
    xs.iter().flat_map(|s| s.faces()).collect()
}

fn vertex_link_brute(k: &SimplicialComplex, v: VertexId) -> BTreeSet<Simplex> {
    all(k)
        .into_iter()
        .filter(|t| !t.contains(v) && k.contains(&t.with_vertex(v)))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn star_and_closure_match_brute_force(k in arb_complex(), pick in 0usize..64) {
        let simplices = k.sorted();
        let x = simplices[pick % simplices.len()].clone();
        prop_assert_eq!(k.star_of(&x).unwrap(), star_brute(&k, std::slice::from_ref(&x)));
        let st = k.star_of(&x).unwrap();
        prop_assert_eq!(all(&k.closure(st.iter()).unwrap()), closure_brute(&st));
    }

    #[test]
    fn link_matches_brute_force(k in arb_complex(), a in 0usize..64, b in 0usize..64) {
        let simplices = k.sorted();
        let xs = vec![simplices[a % simplices.len()].clone(), simplices[b % simplices.len()].clone()];
        let cl_star = closure_brute(&star_brute(&k, &xs));
        let st_cl = star_brute(&k, &closure_brute(&xs.iter().cloned().collect()).into_iter().collect::<Vec<_>>());
        let want: BTreeSet<Simplex> = cl_star.difference(&st_cl).cloned().collect();
        prop_assert_eq!(k.link(xs.iter()).unwrap(), want);
    }

    #[test]
    fn vertex_link_is_the_complement_formula(k in arb_complex(), pick in 0usize..64) {
        let vs = k.vertices();
        let v = vs[pick % vs.len()];
        prop_assert_eq!(k.link([&Simplex::vertex(v)]).unwrap(), vertex_link_brute(&k, v));
    }

    #[test]
    fn link_condition_matches_definition(k in arb_complex(), a in 0usize..64, b in 1usize..64) {
        let vs = k.vertices();
        prop_assume!(vs.len() >= 2);
        let u = vs[a % vs.len()];
        let v = vs[(a % vs.len() + 1 + b % (vs.len() - 1)) % vs.len()];
        let uv = Simplex::edge(u, v);
        let (lu, lv) = (vertex_link_brute(&k, u), vertex_link_brute(&k, v));
        let mut want: Vec<Simplex> = lu
            .intersection(&lv)
            .map(|t| t.with_vertex(u).with_vertex(v))
            .filter(|s| !k.contains(s))
            .collect();
        if !k.contains(&uv) {
            want.push(uv);
        }
        want.sort();
        let lc = k.link_condition(u, v).unwrap();
        prop_assert_eq!(lc.satisfied, want.is_empty());
        prop_assert_eq!(&lc.repair, &want);

        // the repaired complex satisfies the condition
        let mut fixed = k.clone();
        for s in &lc.repair {
            fixed.insert(s.clone()).unwrap();
        }
        prop_assert!(fixed.link_condition(u, v).unwrap().satisfied);
        fixed.check_invariants().unwrap();
    }

    #[test]
    fn rename_matches_image(k in arb_complex(), a in 0usize..64, b in 1usize..64) {
        let vs = k.vertices();
        prop_assume!(vs.len() >= 2);
        let u = vs[a % vs.len()];
        let v = vs[(a % vs.len() + 1 + b % (vs.len() - 1)) % vs.len()];
        let f = VertexMap::collapse(u, v);
        let want: BTreeSet<Simplex> = all(&k).iter().map(|s| f.apply_simplex(s)).collect();
        let image = k.image(&f);
        prop_assert_eq!(all(&image), want.clone());
        image.check_invariants().unwrap();

        // renaming after removing the star of {u,v} lands on the same set
        let mut m = k.clone();
        let mut doomed: Vec<Simplex> = all(&k).into_iter().filter(|s| s.contains(u) && s.contains(v)).collect();
        doomed.sort();
        for s in doomed.iter().rev() {
            m.remove(s).unwrap();
        }
        m.rename_vertex(v, u).unwrap();
        let expect: BTreeSet<Simplex> = all(&k)
            .iter()
            .filter(|s| !(s.contains(u) && s.contains(v)))
            .map(|s| f.apply_simplex(s))
            .collect();
        prop_assert_eq!(all(&m), expect);
        m.check_invariants().unwrap();
    }

    #[test]
    fn cofaces_are_codimension_one(k in arb_complex(), pick in 0usize..64) {
        let simplices = k.sorted();
        let s = &simplices[pick % simplices.len()];
        let want: Vec<Simplex> = simplices
            .iter()
            .filter(|t| t.dim() == s.dim() + 1 && s.is_face_of(t))
            .cloned()
            .collect();
        prop_assert_eq!(k.cofaces(s).unwrap(), want);
    }
}

#[test]
fn removing_a_face_with_cofaces_fails() {
    let mut k = complex_from(&[vec![0, 1, 2]]);
    assert!(k.remove(&Simplex::edge(0, 1)).is_err());
    k.remove(&Simplex::new([0, 1, 2]).unwrap()).unwrap();
    k.remove(&Simplex::edge(0, 1)).unwrap();
    assert_eq!(k.len(), 5);
}
