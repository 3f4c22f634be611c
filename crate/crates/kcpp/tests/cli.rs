use std::fs;

use kcpp::cli::{run, EXIT_NO};
use kcpp::format::{parse_expansion, parse_instance, parse_solution};
use kcpp_core::{lift_solution, solve_kcpp_exact, verify_solution};

const BOWTIE: &str = "p kcpp 5 6 2\ne 1 2 1\ne 2 3 1\ne 3 1 1\ne 3 4 1\ne 4 5 1\ne 5 3 1\n";
const K4: &str = "p kcpp 4 6 2\ne 1 2 1\ne 1 3 1\ne 1 4 1\ne 2 3 1\ne 2 4 1\ne 3 4 1\n";
const STAR: &str = "p kcpp 4 3 3\ne 1 2 1\ne 1 3 1\ne 1 4 1\n";

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn kcpp(args: &[&str], stdin: &str) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("kcpp").chain(args.iter().copied());
    let code = run(argv, &mut stdin.as_bytes(), &mut out, &mut err);
    Run { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn solved_weight(instance: &str, solution: &str) -> u64 {
    let inst = parse_instance(instance).unwrap();
    let (s, k) = parse_solution(solution).unwrap();
    assert_eq!(k, inst.k);
    verify_solution(&inst.graph, k, &s).unwrap()
}

#[test]
fn bowtie_splits_at_cpp_weight() {
    let r = kcpp(&["solve"], BOWTIE);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(solved_weight(BOWTIE, &r.out), 6);
    assert!(r.err.contains("weight=6 cpp_weight=6"));
}

#[test]
fn decision_budget_sets_exit_code() {
    let yes = kcpp(&["solve", "--p", "6"], BOWTIE);
    assert_eq!(yes.code, 0);
    let no = kcpp(&["solve", "--p", "7"], K4);
    assert_eq!(no.code, EXIT_NO);
    assert!(no.err.contains("optimum 8 > budget 7"), "{}", no.err);
    assert_eq!(solved_weight(K4, &no.out), 8);
}

#[test]
fn k_flag_overrides_header() {
    let r = kcpp(&["solve", "--k", "1"], K4);
    assert_eq!(r.code, 0);
    let (s, k) = parse_solution(&r.out).unwrap();
    assert_eq!((k, s.total_weight), (1, 8));
}

#[test]
fn star_takes_the_pendant_route() {
    let r = kcpp(&["kernelize"], STAR);
    assert_eq!(r.code, 0);
    assert!(r.err.contains("outcome=solved via=pendant weight=6"), "{}", r.err);
    assert_eq!(solved_weight(STAR, &r.out), 6);
}

#[test]
fn cpp_and_oracle_agree_on_k4() {
    let cpp = kcpp(&["cpp"], K4);
    assert_eq!(cpp.code, 0);
    assert!(cpp.err.contains("weight=8 join_weight=2"), "{}", cpp.err);
    let oracle = kcpp(&["oracle"], K4);
    assert_eq!(oracle.code, 0);
    assert_eq!(solved_weight(K4, &oracle.out), 8);
}

#[test]
fn pack_cycles_reports_counts() {
    let r = kcpp(&["pack-cycles", "--exact"], BOWTIE);
    assert!(r.err.contains("cycles=2 exact=1"), "{}", r.err);
    let r = kcpp(&["pack-cycles", "--cpp"], STAR);
    assert!(r.err.contains("cycles=3 exact=0"), "{}", r.err);
}

#[test]
fn kernel_and_sidecar_lift_back() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("cycle.kcpp");
    let output = dir.path().join("kernel.kcpp");
    let instance = kcpp(&["gen", "theta", "--paths", "2", "--len", "6", "--k", "2"], "").out;
    fs::write(&input, &instance).unwrap();
    let r = kcpp(&["kernelize", input.to_str().unwrap(), "-o", output.to_str().unwrap()], "");
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.is_empty());
    assert!(r.err.contains("outcome=reduced"), "{}", r.err);

    let original = parse_instance(&instance).unwrap();
    let kernel = parse_instance(&fs::read_to_string(&output).unwrap()).unwrap();
    assert!(kernel.graph.edge_count() < original.graph.edge_count());
    let sidecar = dir.path().join("kernel.kcpp.x");
    let expansion = parse_expansion(&fs::read_to_string(sidecar).unwrap()).unwrap();

    let exact = solve_kcpp_exact(&kernel.graph, kernel.k, 1 << 20).unwrap();
    let lifted = lift_solution(&original.graph, &kernel.graph, &expansion, &exact.solution).unwrap();
    let direct = kcpp(&["solve", input.to_str().unwrap()], "");
    let (s, _) = parse_solution(&direct.out).unwrap();
    assert_eq!(verify_solution(&original.graph, 2, &lifted), Ok(s.total_weight));
}

#[test]
fn gadget_reports_equivalence() {
    let r = kcpp(&["gadget"], "p dkcpp 3 3 1\na 1 2 1\na 2 3 1\na 1 3 1\n");
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.err.contains("g r=0 r'=2 dx=2 holds=1"), "{}", r.err);
}

#[test]
fn generators_are_seeded() {
    for kind in ["chain-inflated", "random-connected", "theta", "directed-random"] {
        let a = kcpp(&["gen", kind, "--seed", "11"], "");
        let b = kcpp(&["gen", kind, "--seed", "11"], "");
        assert_eq!(a.code, 0, "{kind}: {}", a.err);
        assert_eq!(a.out, b.out);
    }
    let a = kcpp(&["gen", "random-connected", "--seed", "1", "--n", "9", "--m", "14"], "");
    let b = kcpp(&["gen", "random-connected", "--seed", "2", "--n", "9", "--m", "14"], "");
    assert_ne!(a.out, b.out);
}

#[test]
fn generated_instances_solve_and_verify() {
    for seed in 0..10 {
        let instance = kcpp(&["gen", "random-connected", "--seed", &seed.to_string(), "--k", "3"], "").out;
        let r = kcpp(&["solve"], &instance);
        assert_eq!(r.code, 0, "{}", r.err);
        solved_weight(&instance, &r.out);
    }
}

#[test]
fn bad_input_exits_one() {
    assert_eq!(kcpp(&["solve"], "p kcpp 2 1 0\ne 1 2 1\n").code, 1);
    assert_eq!(kcpp(&["solve"], "e 1 2 1\n").code, 1);
    assert_eq!(kcpp(&["solve"], "p kcpp 4 2 1\ne 1 2 1\ne 3 4 1\n").code, 1);
    assert_eq!(kcpp(&["solve", "/nonexistent/file"], "").code, 1);
    assert_eq!(kcpp(&["frobnicate"], "").code, 1);
    let help = kcpp(&["--help"], "");
    assert_eq!(help.code, 0);
    assert!(help.out.contains("kernelize"));
}
