use overgroup_core::exec::Exec;
use overgroup_core::overgroup::level::{level_certificate, HGenerators, LevelOptions};
use overgroup_core::overgroup::SigmaPair;
use overgroup_core::rep::{Chevalley, Letter, Rep};
use overgroup_core::rings::Ring;
use overgroup_core::roots::CaseTag;
use overgroup_core::suites::{self, SuiteOptions};

#[test]
fn map_preserves_order() {
    let seq = Exec::Sequential.map(100, |i| i * i);
    let par = Exec::Parallel.map(100, |i| i * i);
    assert_eq!(seq, par);
    assert_eq!(Exec::Parallel.find_failure(50, |i| (i % 7 == 6).then_some(i)), Some((6, 6)));
}

#[test]
fn suite_reports_do_not_depend_on_the_strategy() {
    let rep = Rep::new(CaseTag::B, 0).unwrap();
    let run = |exec| {
        let mut o = SuiteOptions::quick(9);
        o.exec = exec;
        let mut out = suites::root_type_suite(&rep, &o);
        out.extend(suites::extraction_suite(&rep, &o));
        serde_json::to_string(&out).unwrap()
    };
    assert_eq!(run(Exec::Sequential), run(Exec::Parallel));
}

#[test]
fn certificates_do_not_depend_on_the_strategy() {
    let c = Chevalley::new(Rep::new(CaseTag::C, 0).unwrap(), Ring::parse("z4").unwrap());
    let case = c.case().clone();
    let word = vec![
        Letter::X { root: case.omega_plus()[0], value: c.ring.from_int(2) },
        Letter::X { root: case.omega_plus()[5], value: c.ring.from_int(2) },
    ];
    let gens = HGenerators::new(vec![word]);
    let target = SigmaPair::parse(&c.ring, "(2),(0)").unwrap();
    let run = |exec| {
        let mut o = LevelOptions::new(64, 3);
        o.exec = exec;
        level_certificate(&c, &gens, &target, &o).unwrap().to_json(&c).to_string()
    };
    assert_eq!(run(Exec::Sequential), run(Exec::Parallel));
}
