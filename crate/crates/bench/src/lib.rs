//! Fixtures shared by the benchmarks.

use chartdoc_core::chart::{build_chart, ChartInfo, ChartOptions, ChartSpec, ChartSubtype, ColorCatalog};
use chartdoc_core::hierarchy::bundled_hierarchy;
use chartdoc_core::rng::rng_from_seed;
use chartdoc_core::table::{random_table_for, ShapeConfig};

/// One chart of every subtype, built from random tables.
pub fn chart_set(seed: u64) -> Vec<(ChartSpec, ChartInfo)> {
    let hierarchy = bundled_hierarchy();
    let catalog = ColorCatalog::bundled();
    let shape = ShapeConfig::default();
    let mut rng = rng_from_seed(seed);
    ChartSubtype::ALL
        .iter()
        .enumerate()
        .filter_map(|(i, s)| {
            let table = random_table_for(&hierarchy, s.row_rule(), &shape, &mut rng).ok()?;
            let id = format!("L_2023_01_01_00_00_{:02}_0_{}", i % 60, s.code());
            build_chart(table, *s, id, &ChartOptions::default(), &catalog, &mut rng).ok()
        })
        .collect()
}
