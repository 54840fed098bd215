//! Pluggable code-construction strategies.
//!
//! Every constructor is registered behind the [`SolveStrategy`] trait so
//! callers can pick one by name, enumerate what is available, or let
//! [`auto_strategy`] choose. A strategy's `construct` returns `Ok(None)`
//! only when it has proven that no code exists over the requested field;
//! anything weaker ("I gave up") must be an error instead.

use crate::code::BRUTE_FORCE_MAX_BITS;
use crate::code::{brute_force_solve, jaggi_sanders_construct, CodeError, LinearCode};
use crate::field::FieldSpec;
use crate::network::MulticastNetwork;

pub trait SolveStrategy: Sync {
    /// Stable identifier accepted on the command line.
    fn name(&self) -> &'static str;

    /// Cheap screen: can this strategy be attempted on the instance at all?
    /// Passing the screen does not promise that construction succeeds.
    fn applicable(&self, net: &MulticastNetwork, spec: FieldSpec) -> bool;

    /// Build a code, or prove there is none (`Ok(None)`), or fail.
    fn construct(
        &self,
        net: &MulticastNetwork,
        spec: FieldSpec,
    ) -> Result<Option<LinearCode>, CodeError>;
}

/// Exhaustive search over all local kernel assignments.
struct BruteForce;

/// Greedy per-link construction along precomputed disjoint path sets.
struct JaggiSanders;

impl SolveStrategy for BruteForce {
    fn name(&self) -> &'static str {
        "brute-force"
    }

    fn applicable(&self, net: &MulticastNetwork, spec: FieldSpec) -> bool {
        // Mirrors the budget guard inside the search itself.
        let q = spec.order() as u128;
        let mut space: u128 = 1;
        for _ in 0..net.adjacent_pairs().len() {
            space = space.saturating_mul(q);
            if space > (1u128 << BRUTE_FORCE_MAX_BITS) {
                return false;
            }
        }
        true
    }

    fn construct(
        &self,
        net: &MulticastNetwork,
        spec: FieldSpec,
    ) -> Result<Option<LinearCode>, CodeError> {
        brute_force_solve(net, spec)
    }
}

impl SolveStrategy for JaggiSanders {
    fn name(&self) -> &'static str {
        "jaggi-sanders"
    }

    fn applicable(&self, net: &MulticastNetwork, spec: FieldSpec) -> bool {
        spec.order() > net.receiver_ids().len() as u64
    }

    fn construct(
        &self,
        net: &MulticastNetwork,
        spec: FieldSpec,
    ) -> Result<Option<LinearCode>, CodeError> {
        jaggi_sanders_construct(net, spec).map(Some)
    }
}

static BRUTE_FORCE: BruteForce = BruteForce;
static JAGGI_SANDERS: JaggiSanders = JaggiSanders;

/// All registered strategies, in documentation order.
pub fn strategies() -> [&'static dyn SolveStrategy; 2] {
    [&BRUTE_FORCE, &JAGGI_SANDERS]
}

pub fn find_strategy(name: &str) -> Option<&'static dyn SolveStrategy> {
    strategies().into_iter().find(|s| s.name() == name)
}

/// Default choice: the greedy construction whenever the field is big
/// enough for it, otherwise exhaustive search.
pub fn auto_strategy(net: &MulticastNetwork, spec: FieldSpec) -> &'static dyn SolveStrategy {
    if JAGGI_SANDERS.applicable(net, spec) {
        &JAGGI_SANDERS
    } else {
        &BRUTE_FORCE
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::verify_multicast;
    use crate::fixtures;
    use crate::network::parse_network;

    fn butterfly() -> MulticastNetwork {
        parse_network(fixtures::BUTTERFLY).unwrap()
    }

    fn f(p: u64) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    #[test]
    fn registry_names() {
        let names: Vec<&str> = strategies().iter().map(|s| s.name()).collect();
        assert_eq!(names, vec!["brute-force", "jaggi-sanders"]);
        assert_eq!(find_strategy("brute-force").unwrap().name(), "brute-force");
        assert_eq!(
            find_strategy("jaggi-sanders").unwrap().name(),
            "jaggi-sanders"
        );
        assert!(find_strategy("downhill").is_none());
    }

    #[test]
    fn auto_picks_greedy_when_field_exceeds_receiver_count() {
        let net = butterfly();
        assert_eq!(auto_strategy(&net, f(3)).name(), "jaggi-sanders");
        assert_eq!(auto_strategy(&net, f(7)).name(), "jaggi-sanders");
    }

    #[test]
    fn auto_falls_back_to_search_on_small_fields() {
        // Two receivers and q = 2 rules the greedy construction out, but
        // the butterfly still has a code there and search must find it.
        let net = butterfly();
        let strat = auto_strategy(&net, f(2));
        assert_eq!(strat.name(), "brute-force");
        let code = strat.construct(&net, f(2)).unwrap().unwrap();
        assert!(verify_multicast(&code).ok);
    }

    #[test]
    fn applicability_screens() {
        let net = butterfly();
        let comb = parse_network(fixtures::COMBINATION42).unwrap();
        let bf = find_strategy("brute-force").unwrap();
        let js = find_strategy("jaggi-sanders").unwrap();

        // 10 adjacent pairs: 3^10 fits the search budget.
        assert!(bf.applicable(&net, f(3)));
        // 20 adjacent pairs: 3^20 does not.
        assert!(!bf.applicable(&comb, f(3)));

        assert!(js.applicable(&net, f(3)));
        assert!(!js.applicable(&net, f(2)));
        // Six receivers need q > 6.
        assert!(!js.applicable(&comb, f(5)));
        assert!(js.applicable(&comb, f(7)));
    }

    #[test]
    fn both_strategies_yield_valid_codes_on_the_butterfly() {
        let net = butterfly();
        for strat in strategies() {
            assert!(strat.applicable(&net, f(3)), "{}", strat.name());
            let code = strat
                .construct(&net, f(3))
                .unwrap()
                .unwrap_or_else(|| panic!("{} found no code", strat.name()));
            let verdict = verify_multicast(&code);
            assert!(verdict.ok, "{} built a failing code", strat.name());
        }
    }
}
