use chartdoc_bench::chart_set;
use chartdoc_core::chart::ChartSubtype;

#[test]
fn chart_set_covers_every_subtype() {
    let set = chart_set(1);
    assert_eq!(set.len(), ChartSubtype::ALL.len());
    assert_eq!(set, chart_set(1));
}
