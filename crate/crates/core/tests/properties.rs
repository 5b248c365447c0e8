//! Property tests for the invariants of each stage.

mod common;

use std::collections::BTreeMap;

use chartdoc_core::answer::{solve, Value};
use chartdoc_core::chart::ChartSubtype;
use chartdoc_core::debias::{debias, tally};
use chartdoc_core::document::{compose_page, FillerText, ImagePool, LayoutConfig, PageInputs};
use chartdoc_core::eval::{evaluate, judge, Prediction};
use chartdoc_core::hierarchy::{build_hierarchy, parse_edge_list, EntityHierarchy};
use chartdoc_core::pipeline::{assign_split, doc_id, questions_for_chart, QuestionTarget, SplitRatios};
use chartdoc_core::question::{bundled_registry, fill_values, substitute, AnswerType};
use chartdoc_core::render::render;
use chartdoc_core::rng::rng_from_seed;
use common::{chart, check_tree, fixture_dag, inputs};
use proptest::prelude::*;
use rust_decimal::Decimal;

fn cents() -> impl Strategy<Value = Decimal> {
    (-1_000_000i64..1_000_000).prop_map(|c| Decimal::new(c, 2))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn relative_rule_is_scale_covariant(truth in cents(), pred in cents(), k in 1i64..10_000) {
        let k = Decimal::new(k, 2);
        let kt = truth * k;
        prop_assume!(!truth.fract().is_zero() && !kt.fract().is_zero());
        let base = judge(&pred.to_string(), &Value::Number(truth));
        let scaled = judge(&(pred * k).to_string(), &Value::Number(kt));
        prop_assert_eq!(base, scaled);
    }

    #[test]
    fn relative_rule_matches_its_definition(truth in cents(), pred in cents()) {
        prop_assume!(!truth.fract().is_zero());
        let want = (pred - truth).abs() * Decimal::from(20) <= truth.abs();
        prop_assert_eq!(judge(&pred.to_string(), &Value::Number(truth)), want);
    }

    #[test]
    fn text_judging_ignores_padding_and_case(word in "[A-Za-z][A-Za-z ]{0,12}[A-Za-z]", pad in " {0,3}", upper in any::<bool>()) {
        let truth = Value::Text(word.clone());
        let shown = if upper { word.to_uppercase() } else { word.to_lowercase() };
        let padded = format!("{pad}{shown}{pad}");
        let longer = format!("{word}x");
        prop_assert!(judge(&padded, &truth));
        prop_assert!(!judge(&longer, &truth));
    }

    #[test]
    fn judge_is_total(pred in ".{0,20}", n in any::<i64>()) {
        let _ = judge(&pred, &Value::Int(n));
        let _ = judge(&pred, &Value::Number(Decimal::new(n, 2)));
        let _ = judge(&pred, &Value::Bool(n % 2 == 0));
    }

    #[test]
    fn split_assignment_is_a_pure_function(i in 0usize..1_000_000, seed in any::<u64>(), train in 0u32..=100) {
        let train = f64::from(train) / 100.0;
        let r = SplitRatios { train, val: (1.0 - train) / 2.0, test: (1.0 - train) / 2.0 };
        let id = doc_id(i);
        prop_assert_eq!(assign_split(&id, &r, seed), assign_split(&id, &r, seed));
        if train == 1.0 {
            prop_assert_eq!(assign_split(&id, &r, seed), chartdoc_core::Split::Train);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pages_satisfy_layout_invariants(seed in any::<u64>(), k in 0usize..30) {
        let inp = inputs();
        let st = ChartSubtype::ALL[k];
        let fx = chart(st, seed, &inp.hierarchy, &inp.pool);
        let Ok(svg) = render(&fx.spec) else { return Ok(()) };
        let pool = ImagePool::bundled();
        let cfg = LayoutConfig::default();
        let page = PageInputs {
            doc_id: "doc_000000",
            chart: &svg,
            chart_path: "charts/c.svg",
            info: &fx.info,
            pool: &pool,
            text: &FillerText,
            link_prefix: "../",
        };
        if let Ok((record, text)) = compose_page(&page, &cfg, &mut rng_from_seed(seed)) {
            prop_assert_eq!(record.validate(cfg.caption_gap), Ok(()));
            prop_assert!(chartdoc_core::document::xml::parse(&text).is_ok());
            let again = compose_page(&page, &cfg, &mut rng_from_seed(seed)).unwrap();
            prop_assert_eq!(again.0, record);
        }
    }

    #[test]
    fn hierarchies_are_pruned_trees(n in 2usize..120, seed in any::<u64>()) {
        let dag = fixture_dag(n, seed);
        let h = build_hierarchy(&dag).unwrap();
        prop_assert_eq!(check_tree(&dag, &h), Ok(()));
        let mut shuffled = dag.clone();
        shuffled.reverse();
        prop_assert_eq!(&build_hierarchy(&shuffled).unwrap(), &h);
        let reparsed = build_hierarchy(&parse_edge_list(&h.to_edge_list()).unwrap()).unwrap();
        prop_assert_eq!(&reparsed, &h);
        prop_assert_eq!(&EntityHierarchy::from_json(&h.to_json()).unwrap(), &h);
    }

    #[test]
    fn debiasing_balances_and_keeps_answers_correct(seed in any::<u64>()) {
        let inp = inputs();
        let registry = bundled_registry();
        let mut rng = rng_from_seed(seed);
        let mut charts = BTreeMap::new();
        let mut corpus = Vec::new();
        for k in 0..40u64 {
            let st = ChartSubtype::ALL[((seed.wrapping_add(k)) % 30) as usize];
            let mut fx = chart(st, seed.wrapping_mul(31).wrapping_add(k), &inp.hierarchy, &inp.pool);
            fx.info.chart_id = format!("{}_{k}", fx.info.chart_id);
            corpus.extend(questions_for_chart(&fx.info, &registry, QuestionTarget::default(), &mut rng).into_iter().map(|mut q| {
                q.chart_id = fx.info.chart_id.clone();
                q.question_id = format!("{}_{}", q.chart_id, q.template_id);
                q
            }));
            charts.insert(fx.info.chart_id.clone(), fx.info);
        }
        let (out, report) = debias(corpus.clone(), &charts, &registry, seed, 50);
        prop_assert_eq!(out.len(), corpus.len());
        let after = tally(&out);
        for t in &report.templates {
            let c = after[&t.template_id];
            prop_assert_eq!((c.yes, c.no), (t.yes_count, t.no_count));
            prop_assert_eq!(t.balanced, c.yes.abs_diff(c.no) <= 1);
            prop_assert_eq!(c.yes + c.no, t.before.yes + t.before.no);
        }
        let (_, second) = debias(out.clone(), &charts, &registry, seed ^ 1, 50);
        for t in second.templates.iter().filter(|t| report.templates.iter().any(|r| r.template_id == t.template_id && r.balanced)) {
            prop_assert_eq!(t.mutations_applied, 0);
        }
        let by_id: BTreeMap<u32, _> = registry.iter().map(|t| (t.template_id, t)).collect();
        for (q, orig) in out.iter().zip(&corpus) {
            prop_assert_eq!(&q.question_id, &orig.question_id);
            if q.answer_type != AnswerType::YesNo {
                prop_assert_eq!(q, orig);
                continue;
            }
            let t = by_id[&q.template_id];
            prop_assert_eq!(&q.question, &substitute(&t.text, &q.fills));
            let solved = solve(&t.program, &fill_values(t, &q.fills), &charts[&q.chart_id]).ok();
            prop_assert_eq!(&solved, &q.answer);
        }
    }
}

#[test]
fn report_cells_partition_the_judged_set() {
    let inp = inputs();
    let registry = bundled_registry();
    let mut rng = rng_from_seed(3);
    let mut corpus = Vec::new();
    for (k, st) in ChartSubtype::ALL.iter().enumerate() {
        let fx = chart(*st, k as u64, &inp.hierarchy, &inp.pool);
        corpus.extend(questions_for_chart(&fx.info, &registry, QuestionTarget::default(), &mut rng));
    }
    let preds: Vec<Prediction> = corpus
        .iter()
        .enumerate()
        .filter(|(i, _)| i % 4 != 0)
        .map(|(i, q)| Prediction {
            question_id: q.question_id.clone(),
            answer: if i % 3 == 0 { "wrong".into() } else { q.answer.as_ref().unwrap().to_string() },
        })
        .collect();
    let r = evaluate(&preds, &corpus);
    let total = corpus.len();
    assert_eq!(r.overall.total, total);
    for cells in [
        r.by_difficulty.values().collect::<Vec<_>>(),
        r.by_question_type.values().collect(),
        r.by_answer_type.values().collect(),
        r.by_eval_answer_type.values().collect(),
    ] {
        assert_eq!(cells.iter().map(|c| c.total).sum::<usize>(), total);
        assert_eq!(cells.iter().map(|c| c.correct).sum::<usize>(), r.overall.correct);
    }
    assert_eq!(r.unanswered, corpus.len().div_ceil(4));
    let hand_correct = (0..total).filter(|i| i % 4 != 0 && i % 3 != 0).count();
    assert_eq!(r.overall.correct, hand_correct);
}
