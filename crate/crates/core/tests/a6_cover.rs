use std::collections::BTreeMap;

use pslrack::finite::alternating_group;
use pslrack::fpgroup::{
    central_quotient, parse_presentation, perm_group_analysis, RegularGroup, A6_COVER_ROBERTSON, A6_COVER_SCHUR,
    DEFAULT_COSET_LIMIT,
};

fn realize(text: &str) -> RegularGroup {
    RegularGroup::realize(&parse_presentation(text).unwrap(), DEFAULT_COSET_LIMIT).unwrap()
}

fn sizes(pairs: &[(usize, usize)]) -> BTreeMap<usize, usize> {
    pairs.iter().copied().collect()
}

#[test]
fn robertson_presentation_gives_the_cover() {
    let t = std::time::Instant::now();
    let g = realize(A6_COVER_ROBERTSON);
    println!("enumerated {} cosets in {:?}", g.order(), t.elapsed());
    assert_eq!(g.order(), 2160);
    let a = perm_group_analysis(&g).unwrap();
    assert_eq!(a.centre.len(), 6);
    assert!(a.centre_cyclic);
    assert_eq!(a.classes.len(), 31);
    assert_eq!(a.class_sizes, sizes(&[(1, 6), (72, 12), (90, 9), (120, 4)]));
    // perfect, as a Schur cover of a simple group
    assert_eq!(a.derived_order, 2160);

    let q6 = central_quotient(&g, &a, 6).unwrap();
    assert_eq!(q6.order, 360);
    let mut s: Vec<usize> = q6.classes.iter().map(|c| c.size).collect();
    s.sort_unstable();
    assert_eq!(s, vec![1, 40, 40, 45, 72, 72, 90]);

    // the class covering of A6
    let f = q6.fibration(&a);
    assert_eq!(f, [((1, 1), 6), ((72, 72), 12), ((90, 90), 6), ((90, 45), 3), ((120, 40), 4)].into_iter().collect());
    let images = |size: usize| -> Vec<usize> {
        let mut v: Vec<usize> =
            a.classes.iter().enumerate().filter(|(_, c)| c.size == size).map(|(i, _)| q6.class_map[i]).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    // both 72-classes and both 40-classes are hit
    assert_eq!(images(72).len(), 2);
    assert_eq!(images(120).len(), 2);
    assert!(images(120).iter().all(|&i| q6.classes[i].size == 40));

    let q1 = central_quotient(&g, &a, 1).unwrap();
    assert_eq!((q1.order, q1.classes.len()), (2160, 31));
    let q2 = central_quotient(&g, &a, 2).unwrap();
    assert_eq!(q2.order, 1080);
    let q3 = central_quotient(&g, &a, 3).unwrap();
    assert_eq!(q3.order, 720);
    assert!(central_quotient(&g, &a, 4).is_err());
}

#[test]
fn schur_presentation_agrees_and_maps_onto_a6() {
    let g = realize(A6_COVER_SCHUR);
    assert_eq!(g.order(), 2160);
    let a = perm_group_analysis(&g).unwrap();
    assert_eq!(a.class_sizes, sizes(&[(1, 6), (72, 12), (90, 9), (120, 4)]));
    // z generates the centre
    let z = g.generator(4);
    assert_eq!(g.element_order(z), 6);
    assert_eq!(g.subgroup(&[z]), a.centre);

    let fg = g.to_finite_group().unwrap();
    let (a6, perms) = alternating_group(6);
    let find = |p: [usize; 6]| perms.iter().position(|x| x[..] == p[..]).unwrap();
    let images = [
        find([1, 2, 0, 3, 4, 5]), // (1 2 3)
        find([1, 0, 3, 2, 4, 5]), // (1 2)(3 4)
        find([1, 0, 2, 4, 3, 5]), // (1 2)(4 5)
        find([1, 0, 2, 3, 5, 4]), // (1 2)(5 6)
        a6.identity(),
    ];
    let gens: Vec<usize> = (0..5).map(|i| g.generator(i)).collect();
    let f = fg.extend_hom(&gens, &images, &a6).expect("the generator images define a homomorphism");
    let mut kernel: Vec<usize> = (0..2160).filter(|&x| f[x] == a6.identity()).collect();
    kernel.sort_unstable();
    assert_eq!(kernel, a.centre);

    // image class sizes in A6 by preimage class size
    let a6_classes = a6.conjugacy_classes();
    let a6_class_of = a6.class_map(&a6_classes);
    let mut fib: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for c in &a.classes {
        *fib.entry((c.size, a6_classes[a6_class_of[f[c.representative]]].len())).or_default() += 1;
    }
    assert_eq!(fib, [((1, 1), 6), ((72, 72), 12), ((90, 90), 6), ((90, 45), 3), ((120, 40), 4)].into_iter().collect());
}
