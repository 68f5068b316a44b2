use proptest::prelude::*;

use cubeworks::ca::circuits::signal_channel;
use cubeworks::ca::{Lattice, RuleBS};
use cubeworks::cubelets::{expand, format, parse, Assembly, Cube, CubeKind, Orientation, Pos};
use cubeworks::sleptsov::{format_net, parse_net, Net};
use cubeworks::SleptsovNet;

fn lattice() -> impl Strategy<Value = Lattice> {
    (3usize..14, 3usize..14).prop_flat_map(|(w, h)| {
        (Just(w), Just(h), prop::collection::vec(0u8..4, w * h)).prop_map(|(w, h, cells)| {
            let mut l = Lattice::new(w, h);
            for (i, c) in cells.into_iter().enumerate() {
                let (x, y) = (i % w, i / w);
                match c {
                    0 => l.set(x, y, true),
                    1 => l.freeze(x, y, false),
                    _ => {}
                }
            }
            l
        })
    })
}

/// Direct B2/S2345 update with a dead, non-wrapping border.
fn naive_step(l: &Lattice) -> Vec<bool> {
    let (w, h) = (l.width() as i64, l.height() as i64);
    let mut out = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if l.is_frozen(x as usize, y as usize) {
                out.push(l.get(x as usize, y as usize));
                continue;
            }
            let mut n = 0;
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (nx, ny) = (x + dx, y + dy);
                    if (dx, dy) != (0, 0) && nx >= 0 && ny >= 0 && nx < w && ny < h && l.get(nx as usize, ny as usize) {
                        n += 1;
                    }
                }
            }
            out.push(if l.get(x as usize, y as usize) { (2..=5).contains(&n) } else { n == 2 });
        }
    }
    out
}

fn alive(l: &Lattice) -> Vec<bool> {
    (0..l.height()).flat_map(|y| (0..l.width()).map(move |x| (x, y))).map(|(x, y)| l.get(x, y)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn step_matches_direct_update(l in lattice()) {
        prop_assert_eq!(alive(&l.step(&RuleBS::B2_S2345)), naive_step(&l));
    }

    #[test]
    fn reflection_equivariance(l in lattice(), n in 1usize..6) {
        let r = RuleBS::B2_S2345;
        prop_assert_eq!(l.reflect_horizontal().run(&r, n), l.run(&r, n).reflect_horizontal());
        prop_assert_eq!(l.reflect_vertical().run(&r, n), l.run(&r, n).reflect_vertical());
    }

    #[test]
    fn one_step_is_local(l in lattice(), px in 0usize..14, py in 0usize..14) {
        let (px, py) = (px % l.width(), py % l.height());
        prop_assume!(!l.is_frozen(px, py));
        let mut flipped = l.clone();
        flipped.set(px, py, !l.get(px, py));
        let (a, b) = (l.step(&RuleBS::B2_S2345), flipped.step(&RuleBS::B2_S2345));
        for y in 0..l.height() {
            for x in 0..l.width() {
                if x.abs_diff(px) > 1 || y.abs_diff(py) > 1 {
                    prop_assert_eq!(a.get(x, y), b.get(x, y), "({}, {})", x, y);
                }
            }
        }
    }

    #[test]
    fn walls_never_change(l in lattice(), n in 1usize..20) {
        let end = l.run(&RuleBS::B2_S2345, n);
        for y in 0..l.height() {
            for x in 0..l.width() {
                if l.is_frozen(x, y) {
                    prop_assert!(end.is_frozen(x, y));
                    prop_assert_eq!(end.get(x, y), l.get(x, y));
                }
            }
        }
    }
}

fn front(l: &Lattice) -> Option<usize> {
    (0..l.width()).rev().find(|&x| (0..l.height()).any(|y| l.get(x, y) && !l.is_frozen(x, y)))
}

/// After the seed settles the front only moves downstream until it leaves
/// through the open end. Width 7 is excluded: a `Pair` seed stalls there.
#[test]
fn signal_front_never_retreats() {
    const TRANSIENT: usize = 12;
    for width in [3, 4, 5, 6, 8] {
        for bit in 0..2 {
            let scene = signal_channel(60, width, bit, 4).unwrap();
            let mut l = scene.lattice.run(&RuleBS::B2_S2345, TRANSIENT);
            let mut last = front(&l).unwrap();
            let mut reached = false;
            for t in TRANSIENT + 1..=120 {
                l = l.step(&RuleBS::B2_S2345);
                let f = front(&l).unwrap_or_else(|| panic!("signal died: width {width} bit {bit} step {t}"));
                assert!(f >= last, "front went back at width {width} bit {bit} step {t}");
                if f == l.width() - 1 {
                    reached = true;
                    break;
                }
                last = f;
            }
            assert!(reached, "width {width} bit {bit} never reached the end");
        }
    }
}

fn assembly() -> impl Strategy<Value = Assembly> {
    let orients: Vec<Orientation> = Orientation::all_orthogonal().into_iter().filter(|o| o.is_right_handed()).collect();
    let cube = (0..CubeKind::ALL.len(), -3i64..4, -3i64..4, 0i64..3, 0..orients.len());
    prop::collection::vec(cube, 1..30).prop_map(move |cubes| {
        let mut a = Assembly::new("p");
        for (k, x, y, z, o) in cubes {
            let kind = CubeKind::ALL[k];
            let orient = (!kind.is_symmetric()).then_some(orients[o]);
            let _ = a.insert(Cube::new(kind, Pos::new(x, y, z), orient));
        }
        a
    })
}

fn net() -> impl Strategy<Value = (SleptsovNet, Vec<u64>)> {
    let arc = (0usize..4, 0usize..3, 1u64..4, 0u8..3);
    (prop::collection::vec(arc, 1..12), prop::collection::vec(0u64..20, 4)).prop_map(|(arcs, init)| {
        let mut n = Net::new();
        for p in 0..4 {
            n.add_place(&format!("p{p}")).unwrap();
        }
        for t in 0..3 {
            n.add_transition(&format!("t{t}")).unwrap();
        }
        for (p, t, w, kind) in arcs {
            let (p, t) = (format!("p{p}"), format!("t{t}"));
            let _ = match kind {
                0 => n.add_input(&p, &t, w),
                1 => n.add_output(&t, &p, w),
                _ => n.add_inhibitor(&p, &t, w),
            };
        }
        (n, init)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn format_parse_round_trip(a in assembly()) {
        let back = expand(&parse(&format(&a)).unwrap()).unwrap();
        prop_assert_eq!(back.cubes, a.cubes);
    }

    #[test]
    fn net_text_round_trip((n, init) in net()) {
        let m = cubeworks::sleptsov::Marking(init);
        let (n2, m2) = parse_net::<u64>(&format_net(&n, &m)).unwrap();
        prop_assert_eq!(n2, n);
        prop_assert_eq!(m2, m);
    }

    #[test]
    fn runs_respect_inhibitors_and_repeat((n, init) in net()) {
        let m = cubeworks::sleptsov::Marking(init);
        // Maximal firing can grow markings geometrically; 20 steps stay
        // well inside u64 for these weights.
        let a = n.run(&m, 20).unwrap();
        prop_assert_eq!(&a, &n.run(&m, 20).unwrap());
        let mut prev = m.clone();
        for s in &a.steps {
            let t = &n.transitions()[n.transition(&s.transition).unwrap()];
            for &(p, w) in &t.inhibitors {
                prop_assert!(prev.get(p) < w, "{} fired with {} >= {}", s.transition, prev.get(p), w);
            }
            for &(p, w) in &t.inputs {
                prop_assert!(prev.get(p) >= w);
            }
            prev = s.marking.clone();
        }
    }
}
