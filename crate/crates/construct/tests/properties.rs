use num_traits::ToPrimitive;
use proptest::prelude::*;

use shiftlab_construct::family::construct_family;
use shiftlab_construct::schedule::{KSet, ScheduleConfig};
use shiftlab_construct::seed::DistalSeed;
use shiftlab_core::measure::FiniteMeasure;
use shiftlab_core::models::{ShiftModel, TransitionSystem};
use shiftlab_core::num::{int, pow_int, rat, rat_int};
use shiftlab_core::symbolic::{m_epsilon, Word};

fn model(golden: bool) -> ShiftModel {
    if golden {
        ShiftModel::Sft(TransitionSystem::golden_mean())
    } else {
        ShiftModel::full(2).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn schedule_parameters_follow_the_halving_laws(golden in any::<bool>(), e in 0usize..3, stages in 1usize..4) {
        let m = model(golden);
        let w = Word::from("01");
        let seed = DistalSeed::single(&m, &w).unwrap();
        let k = KSet::Point(FiniteMeasure::periodic(w).unwrap());
        let mut cfg = ScheduleConfig::new(stages);
        cfg.eps = rat(1, 16 << e);
        let eps = cfg.eps.clone();
        let fam = construct_family(&m, &k, &seed, &cfg).unwrap();
        let s = &fam.schedule;
        prop_assert_eq!(s.stages.len(), stages);
        let g = m.gluing_gap().unwrap();
        for st in &s.stages {
            let ek = &eps / rat_int(&pow_int(2, st.k));
            prop_assert_eq!(&st.eps, &ek);
            prop_assert_eq!(&st.delta, &(&s.stages[0].delta / rat_int(&pow_int(2, st.k - 1))));
            let n = m.alphabet_size() as i64;
            prop_assert_eq!(&st.eta, &(&ek * rat(n - 1, 4 * n)));
            prop_assert_eq!(st.copy, m_epsilon(m.metric(), &st.eta).unwrap());
            prop_assert_eq!(st.gap, st.copy + g);
            prop_assert_eq!(st.blocks.len(), st.k);
        }
        let ends = s.segment_ends();
        prop_assert!(ends.windows(2).all(|p| p[0] < p[1]));
        prop_assert_eq!(ends.last().unwrap(), &s.end());
        // every segment is long against everything that precedes its successor
        for st in &s.stages {
            for b in &st.blocks {
                for seg in b.chain.iter().chain(std::iter::once(&b.distal)) {
                    prop_assert!(&seg.b - &seg.a > seg.n);
                    prop_assert!(rat_int(&seg.a) < &st.delta * rat_int(&(&seg.b - &seg.a)));
                }
            }
        }
        // the smallest closeness scale keeps Φ informative
        prop_assert!(s.t0() > rat(0, 1) && s.t0() < s.zeta);
        prop_assert!(s.zeta <= rat(1, 2));
    }

    #[test]
    fn members_split_only_at_differing_distal_blocks(golden in any::<bool>(), xi in prop::collection::vec(0u8..2, 3), eta in prop::collection::vec(0u8..2, 3)) {
        let m = model(golden);
        let w = Word::from("01");
        let seed = DistalSeed::single(&m, &w).unwrap();
        let k = KSet::Point(FiniteMeasure::periodic(w).unwrap());
        let fam = construct_family(&m, &k, &seed, &ScheduleConfig::new(3)).unwrap();
        let (x, y) = (fam.member(&xi).unwrap(), fam.member(&eta).unwrap());
        prop_assert!(fam.verify_member(&x).unwrap().ok());
        let s = &fam.schedule;
        // first distal slot copying a block where ξ and η differ
        let split = s.stages.iter().flat_map(|st| st.blocks.iter()).filter(|b| xi[b.i - 1] != eta[b.i - 1]).map(|b| b.distal.a.clone()).min();
        let seps = s.separation(&xi, &eta);
        let expected: usize = s.stages.iter().map(|st| (1..=st.k).filter(|&i| xi[i - 1] != eta[i - 1]).count()).sum();
        prop_assert_eq!(seps.len(), expected);
        match split {
            None => {
                let h = s.end().to_usize().unwrap().min(1 << 16);
                prop_assert_eq!(x.stream.window(&int(1), h).unwrap(), y.stream.window(&int(1), h).unwrap());
            }
            Some(a) => {
                // agree up to the gluing bridge before the split, then differ inside its copy
                let g = m.gluing_gap().unwrap();
                let before = (&a - int(g as i64)).to_usize().unwrap_or(usize::MAX).min(1 << 16);
                if before > 0 {
                    prop_assert_eq!(x.stream.window(&int(1), before).unwrap(), y.stream.window(&int(1), before).unwrap());
                }
                let start = &a + int(1);
                prop_assert_ne!(x.stream.window(&start, 64).unwrap(), y.stream.window(&start, 64).unwrap());
                prop_assert!(seps.iter().all(|sp| sp.t0 < s.zeta));
            }
        }
        prop_assert!(seps.iter().all(|sp| sp.bound <= rat(2, 1) * &s.stages[0].delta && sp.bound > rat(0, 1)));
    }
}
