use pclique::chains::instrument::{is_absorbing, replay};
use pclique::chains::{outside_at_most, run_chain, run_peel, ChainConfig, ChainKind, Init, TiePolicy};
use pclique::graph_gen::gen_planted;
use pclique::landscape::local_min_report;
use pclique::{GammaParam, Seed};

fn gamma(p: u64) -> GammaParam {
    GammaParam::integer(p).unwrap()
}

#[test]
fn peel_matches_descent_while_descent_removes() {
    for s in 0..6 {
        let inst = gen_planted(600, 45, Seed(s)).unwrap();
        let cfg = ChainConfig::new(Init::Full, ChainKind::Gd(TiePolicy::Halt), gamma(4), 4 * 600);
        let gd = run_chain(&inst, &cfg, Seed(s)).unwrap();
        let (peel, _) = run_peel(&inst, gamma(4), outside_at_most(&inst, 0), None, Seed(s));
        let removals = gd.records.iter().skip(1).take_while(|r| r.mv.is_removal()).count();
        assert!(removals > 400, "seed {s}: only {removals} removals");
        for t in 1..=removals.min(peel.records.len() - 1) {
            assert_eq!(gd.records[t].mv, peel.records[t].mv, "seed {s}, step {t}");
        }
    }
}

#[test]
fn peel_retains_most_of_the_clique() {
    let (n, k, seeds) = (2000, 90, 10u64);
    let mut good = 0;
    for s in 0..seeds {
        let inst = gen_planted(n, k, Seed(s)).unwrap();
        let (_, diag) = run_peel(&inst, gamma(4), outside_at_most(&inst, 0), Some(1.0), Seed(s));
        if diag.retained_fraction(k).unwrap() >= 0.9 {
            good += 1;
        }
    }
    assert!(2 * good > seeds, "only {good}/{seeds} seeds kept 90% of the clique");
}

#[test]
fn no_local_minimum_before_the_small_regime() {
    let (n, k) = (1500, 80);
    let small = (20.0 * (n as f64).log2()) as usize;
    for s in 0..4 {
        let inst = gen_planted(n, k, Seed(s)).unwrap();
        let cfg = ChainConfig::new(Init::Full, ChainKind::Gd(TiePolicy::Halt), gamma(4), 4 * n);
        let traj = run_chain(&inst, &cfg, Seed(s)).unwrap();
        let all: Vec<usize> = (0..n).collect();
        let mut checked = 0;
        replay(inst.graph(), gamma(4), &all, &traj, |state, rec| {
            let outside = state.to_vec().iter().filter(|&&x| !inst.in_pc(x)).count();
            if rec.t % 7 == 0 && outside > small {
                assert!(!is_absorbing(state), "seed {s}: absorbing state at t = {}", rec.t);
                assert!(
                    !local_min_report(state).is_strict_local_min,
                    "seed {s}: local minimum at t = {}",
                    rec.t
                );
                checked += 1;
            }
        })
        .unwrap();
        assert!(checked > 100, "seed {s}: only {checked} states checked");
    }
}
