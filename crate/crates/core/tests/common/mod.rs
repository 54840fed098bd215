//! Shared generators and slow oracles for the integration suites.
//!
//! Everything here is either an independent re-derivation of something the
//! library computes (so the two can disagree loudly) or a seeded random
//! instance builder. Keep library shortcuts out of this file.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::Rng;

use netcode_core::field::FieldSpec;
use netcode_core::matroid::{
    transversal_matroid, BipartiteSystem, Matroid, SubsetMask, TransversalMatroid, VectorMatroid,
};
use netcode_core::network::MulticastNetwork;

/// Random layered multicast network with at most `max_links` real links.
///
/// Every receiver is wired with `dimension` fresh backbone paths, so the
/// flow requirement holds by construction; extra links are sprinkled on
/// top and may create parallel links, shared relays, and bottleneck reuse.
pub fn random_network(rng: &mut impl Rng, max_links: usize) -> MulticastNetwork {
    loop {
        let omega = rng.gen_range(1..=3usize);
        let m = rng.gen_range(1..=3usize);
        let slots = omega * m;
        if slots > max_links {
            continue;
        }
        let k = rng.gen_range(0..=3usize);

        let mut nodes = vec!["s".to_string()];
        for i in 1..=k {
            nodes.push(format!("v{i}"));
        }
        let receivers: Vec<String> = (1..=m).map(|i| format!("t{i}")).collect();
        nodes.extend(receivers.iter().cloned());

        // Node layers: s = 0, v_i = i, receivers = k + 1.
        let layer = |id: &str| -> usize {
            match id.strip_prefix('v') {
                Some(n) => n.parse().unwrap(),
                None if id == "s" => 0,
                None => k + 1,
            }
        };

        let mut links: Vec<(String, String, String)> = Vec::new();
        let mut placed = 0usize;
        for (ti, t) in receivers.iter().enumerate() {
            for slot in 0..omega {
                let remaining = (m - ti - 1) * omega + (omega - slot - 1);
                let spare = max_links - placed - remaining - 1;
                let hops = rng.gen_range(0..=k.min(2).min(spare));
                let mut stops = sample(rng, k, hops).into_vec();
                stops.sort_unstable();
                let mut cur = "s".to_string();
                for v in stops {
                    let id = format!("l{}", links.len() + 1);
                    links.push((id, cur.clone(), format!("v{}", v + 1)));
                    cur = format!("v{}", v + 1);
                    placed += 1;
                }
                let id = format!("l{}", links.len() + 1);
                links.push((id, cur, t.clone()));
                placed += 1;
            }
        }

        let extras = rng.gen_range(0..=max_links - placed);
        for _ in 0..extras {
            // Tails sit strictly below the receiver layer, heads strictly
            // above the tail, so the layering keeps the digraph acyclic.
            let tail = if k == 0 || rng.gen_bool(0.4) {
                "s".to_string()
            } else {
                format!("v{}", rng.gen_range(1..=k))
            };
            let tl = layer(&tail);
            let mut heads: Vec<String> = Vec::new();
            for i in tl + 1..=k {
                heads.push(format!("v{i}"));
            }
            heads.extend(receivers.iter().cloned());
            let head = heads[rng.gen_range(0..heads.len())].clone();
            let id = format!("l{}", links.len() + 1);
            links.push((id, tail, head));
        }

        return MulticastNetwork::build(omega, nodes, links, "s", receivers)
            .expect("generated network is valid by construction");
    }
}

/// Minimum cardinality of a link set (imaginary links included) whose
/// removal disconnects every imaginary link from `t`. By the edge version
/// of Menger's theorem this equals the link-disjoint path count.
pub fn exhaustive_min_cut(net: &MulticastNetwork, t: &str) -> usize {
    let n = net.num_links();
    assert!(n <= 20, "oracle is exponential in the link count");
    let reachable = |removed: u64| -> bool {
        // BFS over links: a link is live if its tail is the source side.
        let mut live: Vec<bool> = vec![false; n];
        let mut changed = true;
        while changed {
            changed = false;
            for i in 0..n {
                if live[i] || removed >> i & 1 == 1 {
                    continue;
                }
                let ok = match net.link_tail_id(i) {
                    None => true,
                    Some(tail) => (0..n).any(|j| live[j] && net.link_head_id(j) == tail),
                };
                if ok {
                    live[i] = true;
                    changed = true;
                }
            }
        }
        (0..n).any(|i| live[i] && net.link_head_id(i) == t)
    };
    (0..=n)
        .find(|&size| {
            // Any subset of this size that cuts t suffices.
            subsets_of_size(n, size).any(|mask| !reachable(mask))
        })
        .expect("removing every link always disconnects")
}

fn subsets_of_size(n: usize, size: usize) -> impl Iterator<Item = u64> {
    let end: u64 = 1 << n;
    (0..end).filter(move |m| m.count_ones() as usize == size)
}

/// Base orderability by brute force: for each ordered pair of bases, try
/// every bijection between them instead of running a matching. Factorial
/// in the rank, so keep ranks tiny.
pub fn factorial_base_orderable(ground_len: usize, family: &[SubsetMask]) -> bool {
    let bases: Vec<Vec<usize>> = family.iter().map(|b| b.iter().collect()).collect();
    let in_family = |m: SubsetMask| family.contains(&m);
    let _ = ground_len;
    for (i, b1) in bases.iter().enumerate() {
        for b2 in bases.iter().skip(i + 1) {
            let r = b1.len();
            assert!(r <= 5, "factorial oracle not meant for rank {r}");
            let mut perm: Vec<usize> = (0..r).collect();
            let mut found = false;
            'perms: loop {
                let ok = (0..r).all(|j| {
                    let x = b1[j];
                    let y = b2[perm[j]];
                    x == y || {
                        let m1 = family[i].without(x).with(y);
                        let m2 = SubsetMask::from_indices(b2).without(y).with(x);
                        in_family(m1) && in_family(m2)
                    }
                });
                if ok {
                    found = true;
                    break 'perms;
                }
                if !next_permutation(&mut perm) {
                    break 'perms;
                }
            }
            if !found {
                return false;
            }
        }
    }
    true
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Random genuine matroid, represented over a small prime field.
pub fn random_vector_matroid(rng: &mut impl Rng) -> VectorMatroid {
    let spec = FieldSpec::prime([2u64, 3, 5][rng.gen_range(0..3)]).unwrap();
    let rows = rng.gen_range(1..=3usize);
    let n = rng.gen_range(1..=8usize);
    let labels: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let cols: Vec<Vec<_>> = (0..n)
        .map(|_| {
            (0..rows)
                .map(|_| spec.element(rng.gen_range(0..spec.order())).unwrap())
                .collect()
        })
        .collect();
    VectorMatroid::new(spec, labels, &cols).unwrap()
}

/// Random transversal matroid on at most 8 elements.
pub fn random_transversal_matroid(rng: &mut impl Rng) -> TransversalMatroid {
    let n = rng.gen_range(1..=8usize);
    let ground: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let sets = (0..rng.gen_range(1..=3usize))
        .map(|j| {
            let size = rng.gen_range(1..=n);
            let members: BTreeSet<usize> = (0..size).map(|_| rng.gen_range(0..n)).collect();
            (
                format!("A{j}"),
                members.into_iter().map(|i| ground[i].clone()).collect(),
            )
        })
        .collect();
    transversal_matroid(&BipartiteSystem { ground, sets }).unwrap()
}

/// All subsets of the ground of `m`, as masks.
pub fn all_subsets<M: Matroid + ?Sized>(m: &M) -> impl Iterator<Item = SubsetMask> {
    let n = m.ground().len();
    assert!(n <= 20);
    (0..1u64 << n).map(SubsetMask::from_raw)
}
