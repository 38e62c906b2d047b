use wfdeclare_core::benchgen::{BenchMode, ExpansionState};
use wfdeclare_core::net::write_pnml;
use wfdeclare_core::statespace::{analyze, DEFAULT_STATE_LIMIT};
use wfdeclare_core::synthesis::synthesize_unchecked;

#[test]
fn small_constraint_count_nets_are_safe_and_sound() {
    for (i, state) in BenchMode::ConstraintCount.chain(4).enumerate() {
        let report = analyze(state.net(), DEFAULT_STATE_LIMIT).unwrap();
        assert!(report.is_sound(), "iteration {}: {:?}", i + 1, report.failures());
    }
}

#[test]
fn formula_size_grows_two_literals_per_alternative() {
    let base = synthesize_unchecked(ExpansionState::sequential_base().net()).literal_count();
    for (i, state) in BenchMode::FormulaSize.chain(12).enumerate() {
        let k = i + 1;
        let spec = synthesize_unchecked(state.net());
        assert_eq!(spec.literal_count(), base + 2 * k);
        assert_eq!(spec.constraints().len(), state.net().places().len());

        let (before, after) = state.boundary();
        let alternatives = state.net().postset(before).unwrap();
        assert_eq!(alternatives.len(), k + 1);
        assert_eq!(state.net().preset(after).unwrap().len(), k + 1);
        let widest = spec.constraints().iter().flat_map(|c| c.params()).map(|p| p.len()).max().unwrap();
        assert_eq!(widest, k + 1);
    }
}

#[test]
fn small_formula_size_nets_are_sound() {
    for state in BenchMode::FormulaSize.chain(5) {
        assert!(analyze(state.net(), DEFAULT_STATE_LIMIT).unwrap().is_sound());
    }
}

#[test]
fn generation_is_deterministic() {
    for mode in [BenchMode::ConstraintCount, BenchMode::FormulaSize] {
        let a: Vec<String> = mode.chain(6).map(|s| write_pnml(s.net())).collect();
        let b: Vec<String> = mode.chain(6).map(|s| write_pnml(s.net())).collect();
        assert_eq!(a, b);
        assert_eq!(write_pnml(mode.state(6).net()), a[5]);
    }
}

#[test]
fn fresh_names_count_up_from_one() {
    let s = ExpansionState::base().expand_iteration().expand_iteration();
    let net = s.net();
    for k in 1..=12 {
        assert!(net.places().iter().any(|p| p == &format!("p_gen_{k}")), "p_gen_{k}");
    }
    for k in 1..=14 {
        assert!(net.transitions().iter().any(|t| t == &format!("t_gen_{k}")), "t_gen_{k}");
    }
    assert_eq!(s.pivot(), "t1");
}
