use proptest::prelude::*;

use pslrack::abelian::{factor, AbelianInvariants};
use pslrack::conjugacy::{all_classes, class_members, class_of, power_class, tabulated_psl, ClassType};
use pslrack::field::field_of_order;
use pslrack::fpgroup::{parse_presentation, Word};
use pslrack::matrix::MatrixGroup;
use pslrack::rack::ConjRack;

const QS: [u32; 9] = [2, 3, 4, 5, 7, 8, 9, 11, 13];

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_arithmetic(qi in 0..QS.len(), a in 0u32..13, b in 0u32..13, c in 0u32..13) {
        let f = field_of_order(QS[qi]).unwrap();
        let q = f.q();
        let (a, b, c) = (f.elem(a % q).unwrap(), f.elem(b % q).unwrap(), f.elem(c % q).unwrap());
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(f.sub(a, b), b), a);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.from_int(1));
            prop_assert_eq!(f.pow(a, q as u64 - 1), f.from_int(1));
        }
    }

    /// Conjugating by a random element fixes the class descriptor.
    #[test]
    fn class_of_is_conjugation_invariant(qi in 0..QS.len(), i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let f = field_of_order(QS[qi]).unwrap();
        let g = MatrixGroup::psl(&f);
        let elems = g.enumerate().unwrap();
        let (x, h) = (i.get(&elems), j.get(&elems));
        prop_assert_eq!(class_of(&f, &g.conjugate(h, x)), class_of(&f, x));
    }

    /// Power maps compose: (x^a)^b lies in the class of x^(ab).
    #[test]
    fn power_maps_compose(qi in 0..QS.len(), ci in any::<prop::sample::Index>(), a in 1i64..40, b in 1i64..40) {
        let f = field_of_order(QS[qi]).unwrap();
        let classes = all_classes(&f);
        let c = ci.get(&classes);
        let o = c.order;
        prop_assume!(c.class_type.is_semisimple() && gcd(a as u64, o) == 1 && gcd(b as u64, o) == 1);
        let lhs = power_class(&f, &power_class(&f, &c.descriptor, a), b);
        prop_assert_eq!(lhs, power_class(&f, &c.descriptor, a * b));
    }

    /// Random triples in a random class satisfy self-distributivity.
    #[test]
    fn conjugation_racks_self_distribute(
        qi in 0..QS.len(),
        ci in any::<prop::sample::Index>(),
        xs in prop::array::uniform3(any::<prop::sample::Index>()),
    ) {
        let f = field_of_order(QS[qi]).unwrap();
        let classes = all_classes(&f);
        let c = ci.get(&classes);
        prop_assume!(c.class_type != ClassType::Identity);
        let t = tabulated_psl(&f).unwrap();
        let r = ConjRack::new(t.table(), &class_members(&t, &c.descriptor)).unwrap();
        let r = r.rack();
        let n: Vec<usize> = (0..r.len()).collect();
        let [x, y, z] = xs.map(|i| *i.get(&n));
        prop_assert_eq!(r.op(x, r.op(y, z)), r.op(r.op(x, y), r.op(x, z)));
        prop_assert_eq!(r.op(x, x), x);
    }

    #[test]
    fn abelian_invariants_from_primary(parts in prop::collection::vec((0usize..4, 1u32..4), 0..6)) {
        let primes = [2u64, 3, 5, 7];
        let primary: Vec<u64> = parts.iter().map(|&(p, k)| primes[p].pow(k)).collect();
        let a = AbelianInvariants::from_primary(primary.clone());
        prop_assert_eq!(a.order(), primary.iter().product::<u64>());
        prop_assert!(a.invariant_factors.windows(2).all(|w| w[1] % w[0] == 0));
        let mut back: Vec<u64> = a
            .invariant_factors
            .iter()
            .flat_map(|&d| factor(d).into_iter().map(|(p, k)| p.pow(k)))
            .collect();
        back.sort_unstable();
        prop_assert_eq!(back, a.primary.clone());
    }

    #[test]
    fn words_reduce_and_round_trip(letters in prop::collection::vec(prop::sample::select(vec![1i32, -1, 2, -2, 3, -3]), 0..20)) {
        let p = parse_presentation("< a, b, c | a^2 >").unwrap();
        let mut w = Word::identity();
        for l in &letters {
            w.push(*l);
        }
        prop_assert!(w.0.windows(2).all(|s| s[0] != -s[1]));
        prop_assert!(w.mul(&w.inverse()).is_empty());
        let text = p.format_word(&w);
        prop_assert_eq!(p.parse_word(&text).unwrap(), w);
    }
}
