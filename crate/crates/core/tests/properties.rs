mod common;

use std::sync::Arc;

use proptest::prelude::*;

use paqc::affine::{lex_cmp, AffineExpr, Binding, Constraint, IntegerSet};
use paqc::axl::{load, parse_source, print_program};
use paqc::codegen::{GateStream, Op};
use paqc::deps::compute_instance_deps;
use paqc::harness::geomean;
use paqc::mapper::{allocate, build_topology, stream_depth, verify_mapped, AllocOptions, Allocator, TOPOLOGIES};
use paqc::scop::assemble;
use paqc::transform::{check_legality, ScheduleOptions};
use paqc::{compile_program, GateCatalog, TransformKind};

fn lin(coeffs: &[i64], c: i64) -> AffineExpr {
    let mut e = AffineExpr::constant(c);
    for (k, &a) in coeffs.iter().enumerate() {
        e = e.add(&AffineExpr::iter(k).scale(a));
    }
    e
}

/// One gate call over iterator `i` and parameter `N`, never repeating an
/// operand at any instance.
fn gate_strategy() -> impl Strategy<Value = String> {
    let idx =
        (0i64..3, prop::bool::ANY).prop_map(|(a, down)| if down { format!("N-1-i+{a}") } else { format!("i+{a}") });
    prop_oneof![
        idx.clone().prop_map(|e| format!("#X({e})")),
        (idx.clone(), 1i64..3).prop_map(|(e, d)| format!("#CNOT({e}, {e}+{d})")),
        (idx.clone(), 1i64..3).prop_map(|(e, d)| format!("#CNOT({e}+{d}, {e})")),
        (0i64..3).prop_map(|a| format!("#CNOT(N+5, i+{a})")),
        (idx, 1i64..3, 1i64..3).prop_map(|(e, d, f)| format!("#Toffoli({e}, {e}+{d}, {e}+{d}+{f})")),
    ]
}

fn program_strategy() -> impl Strategy<Value = (String, i64)> {
    (prop::collection::vec(prop::collection::vec(gate_strategy(), 1..4), 1..4), 2i64..6).prop_map(|(stmts, n)| {
        let names: Vec<String> = (1..=stmts.len()).map(|k| format!("S{k}")).collect();
        let mut src = format!("param N;\nstatement {};\n", names.join(", "));
        for (name, gates) in names.iter().zip(&stmts) {
            src.push_str(&format!("{name} := {{i: 0<=i<N ( {} )}};\n", gates.join(" (+) ")));
        }
        src.push_str(&format!("codegen {{{}}} with {{N={n}}};\n", names.join(" (+) ")));
        (src, n)
    })
}

fn circuit_strategy() -> impl Strategy<Value = Vec<(u8, Vec<usize>)>> {
    let op = prop_oneof![
        (0usize..20).prop_map(|q| (0u8, vec![q])),
        prop::sample::subsequence((0usize..20).collect::<Vec<_>>(), 2).prop_shuffle().prop_map(|v| (1u8, v)),
        prop::sample::subsequence((0usize..20).collect::<Vec<_>>(), 3).prop_shuffle().prop_map(|v| (2u8, v)),
    ];
    prop::collection::vec(op, 1..40)
}

fn build_circuit(ops: &[(u8, Vec<usize>)]) -> GateStream {
    let cat = GateCatalog::standard();
    let names = ["H", "CNOT", "Toffoli"];
    GateStream::from_ops(
        ops.iter()
            .map(|(g, q)| Op::new(Arc::new(cat.signature(names[*g as usize]).unwrap().clone()), q.clone()))
            .collect(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn enumerate_matches_box_scan(
        rows in prop::collection::vec((prop::collection::vec(-2i64..3, 2), -6i64..7), 0..4),
        hi in 0i64..6,
    ) {
        let mut cons = vec![
            Constraint::ge(lin(&[1, 0], 0)),
            Constraint::ge(lin(&[-1, 0], hi)),
            Constraint::ge(lin(&[0, 1], 1)),
            Constraint::ge(lin(&[0, -1], hi)),
        ];
        cons.extend(rows.iter().map(|(c, k)| Constraint::ge(lin(c, *k))));
        let set = IntegerSet::new(vec!["x".into(), "y".into()], cons);
        let b = Binding::new();
        let mut brute = Vec::new();
        for x in -2..=hi + 2 {
            for y in -3..=hi + 2 {
                if set.contains(&[x, y], &b).unwrap() {
                    brute.push(vec![x, y]);
                }
            }
        }
        let got = set.enumerate(&b).unwrap();
        prop_assert!(got.windows(2).all(|w| lex_cmp(&w[0], &w[1]).is_lt()));
        prop_assert_eq!(got, brute);
    }

    #[test]
    fn printer_round_trips((src, _n) in program_strategy()) {
        let a = parse_source(&src).unwrap();
        let printed = print_program(&a);
        let b = parse_source(&printed).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(print_program(&b), printed);
    }

    #[test]
    fn transforms_are_legal_and_preserve_gates((src, _n) in program_strategy()) {
        let p = load(&src, &GateCatalog::standard()).unwrap();
        let opts = ScheduleOptions::default();
        let base = compile_program(&p, 0, Some(TransformKind::Base), &Binding::new(), &opts).unwrap();
        for k in TransformKind::ALL {
            let c = compile_program(&p, 0, Some(k), &Binding::new(), &opts).unwrap();
            prop_assert_eq!(c.stream.multiset(), base.stream.multiset());
            prop_assert!(check_legality(&c.scop, &c.solution, &c.scop.binding).unwrap().overall);
            prop_assert!(c.solution.linear_dims() <= base.solution.linear_dims());
        }
    }

    #[test]
    fn dependences_match_brute_force((src, _n) in program_strategy()) {
        let p = load(&src, &GateCatalog::standard()).unwrap();
        let scop = assemble(&p, 0);
        let fast = compute_instance_deps(&scop, &scop.binding).unwrap();
        prop_assert_eq!(common::edge_keys(&fast), common::brute_deps(&scop, &scop.binding));
    }

    #[test]
    fn mapped_circuits_replay(ops in circuit_strategy(), seed in 0u64..1000, t in 0usize..3) {
        let s = build_circuit(&ops);
        let g = build_topology(TOPOLOGIES[t]).unwrap();
        for a in Allocator::ALL {
            let (pc, m) = allocate(&s, &g, a, seed, &AllocOptions::default()).unwrap();
            prop_assert!(verify_mapped(&s, &pc, &g));
            prop_assert_eq!(m.added_gates, 3 * m.swaps + 5 * m.reverses);
            prop_assert_eq!(m.size, s.len() + m.added_gates);
            prop_assert!(m.depth >= stream_depth(&s));
            let (again, _) = allocate(&s, &g, a, seed, &AllocOptions::default()).unwrap();
            prop_assert_eq!(again, pc);
        }
    }

    #[test]
    fn directed_replay(ops in circuit_strategy(), seed in 0u64..1000) {
        let s = build_circuit(&ops);
        let g = build_topology("grid6x6").unwrap().directed(true);
        for a in Allocator::ALL {
            let (pc, m) = allocate(&s, &g, a, seed, &AllocOptions::default()).unwrap();
            prop_assert!(verify_mapped(&s, &pc, &g));
            prop_assert_eq!(m.size, s.len() + 3 * m.swaps + 4 * m.reverses);
        }
    }

    #[test]
    fn depth_is_dag_longest_path(ops in circuit_strategy()) {
        let s = build_circuit(&ops);
        prop_assert_eq!(stream_depth(&s), common::dag_depth(&s));
    }

    #[test]
    fn geomean_is_the_product_root(xs in prop::collection::vec(1.0f64..1000.0, 1..12)) {
        let root = xs.iter().product::<f64>().powf(1.0 / xs.len() as f64);
        let g = geomean(&xs).unwrap();
        prop_assert!((g - root).abs() <= 1e-9 * root);
    }
}
