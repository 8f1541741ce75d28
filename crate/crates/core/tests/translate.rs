use std::collections::BTreeMap;

use scjc::ast::*;
use scjc::checker::check_program;
use scjc::parser::parse_program;
use scjc::sim::{Model, Policy, Sim};
use scjc::translate::{monolithic, translate_program};

const S_ANCHOR: &str = include_str!("../programs/s_anchor.scjc");

fn consts(pd: u64) -> BTreeMap<String, u64> {
    [("P", 10), ("ID", 2), ("PTB", 3), ("PD", pd), ("AD", 4), ("ATB", 1), ("OD", 2)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

fn process_names(p: &Program) -> Vec<String> {
    p.paragraphs
        .iter()
        .filter_map(|x| match x {
            Paragraph::Circus(CircusParagraph::Process(d)) => Some(d.name.clone()),
            _ => None,
        })
        .collect()
}

#[test]
fn s_anchor_translation_shape() {
    let p = parse_program(S_ANCHOR).unwrap();
    let t = translate_program(&p).unwrap();
    let again = parse_program(&t.text()).unwrap_or_else(|e| panic!("{e:?}"));
    assert_eq!(again, t.program());
    let d = check_program(&again);
    assert!(d.iter().all(|d| !d.is_error()), "{d:?}");
    let names = process_names(&again);
    let apps = names.iter().filter(|n| n.ends_with("_App")).count();
    assert_eq!(apps, 5);
    for (scj, (app, composed)) in &t.components {
        assert!(names.contains(app) && names.contains(composed), "{scj}");
    }
    assert_eq!(names.iter().filter(|n| *n == "Application").count(), 1);
    assert_eq!(names.last().map(String::as_str), Some("Application"));
}

#[test]
fn s_anchor_starts_up_in_order() {
    let p = parse_program(S_ANCHOR).unwrap();
    let t = translate_program(&p).unwrap();
    let s = Sim::new(Model::new(&t.program(), &consts(6)).unwrap(), "System").unwrap();
    let r = s.run(&Policy::Random(0), 5);
    let chans: Vec<&str> = r.trace.iter().map(|(_, e)| e.chan.as_str()).collect();
    assert_eq!(
        &chans[..7],
        [
            "start_sequencer",
            "start_mission",
            "PeriodicHandlerInitCall",
            "PeriodicHandlerInitRet",
            "AperiodicHandlerInitCall",
            "AperiodicHandlerInitRet",
            "start_peh",
        ]
    );
    assert!(chans.contains(&"input") && chans.contains(&"release") && chans.contains(&"output"));
}

#[test]
fn monolithic_composition_builds() {
    let p = parse_program(S_ANCHOR).unwrap();
    let mut mono = translate_program(&p).unwrap().program();
    mono.paragraphs.extend(monolithic(&p));
    let s = Sim::new(Model::new(&mono, &consts(6)).unwrap(), "Monolithic").unwrap();
    let r = s.run(&Policy::Random(0), 1);
    assert_eq!(r.trace.first().map(|(_, e)| e.chan.as_str()), Some("start_sequencer"));
}
