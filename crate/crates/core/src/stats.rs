//! Measured statistics of an input and a built structure, side by side with
//! the closed forms.

use serde::Serialize;

use crate::container::{AnyLpMphf, Variant};
use crate::error::Result;
use crate::lookup::LpHash;
use crate::minimizer::{MinimizerCensus, MinimizerScheme, SuperKmerRecord};
use crate::partitioned::classify_record;
use crate::spss::SpssInput;
use crate::theory::{type_probabilities, TheoryParams};

/// `1 - |A|/n`, where `A` counts adjacent k-mer pairs of one string whose
/// values differ by exactly +1.
pub fn measure_epsilon<H: LpHash>(f: &H, spss: &SpssInput) -> f64 {
    let n = spss.num_kmers();
    if n == 0 {
        return 0.0;
    }
    let mut adjacent = 0u64;
    for s in spss.strings() {
        let vals = f.stream_lookup(s).expect("input strings are valid queries");
        adjacent += vals.windows(2).filter(|p| p[1] == p[0] + 1).count() as u64;
    }
    1.0 - adjacent as f64 / n as f64
}

/// Fractions of unambiguous super-k-mers of each type, in
/// [`FlType::ALL`](crate::partitioned::FlType::ALL) order.
pub fn measured_type_proportions(
    records: &[SuperKmerRecord],
    census: &MinimizerCensus,
    w: u32,
) -> [f64; 4] {
    let mut counts = [0u64; 4];
    for r in records.iter().filter(|r| !census.is_ambiguous(r.minimizer)) {
        counts[classify_record(r, w).code() as usize] += 1;
    }
    let total = counts.iter().sum::<u64>().max(1) as f64;
    counts.map(|c| c as f64 / total)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatsReport {
    pub variant: String,
    pub k: usize,
    pub m: usize,
    pub w: usize,
    pub num_kmers: u64,
    pub num_strings: usize,
    pub alpha: f64,
    pub xi: f64,
    pub num_minimizers: u64,
    pub num_ambiguous_minimizers: usize,
    pub num_super_kmers: usize,
    pub epsilon: f64,
    pub measured_density: f64,
    pub predicted_density: f64,
    pub measured_types: [f64; 4],
    pub computed_types: [f64; 4],
    pub b_minimizer_mphf: f64,
    pub bits_per_kmer: f64,
    /// Closed-form bits per k-mer of each layout plus the fallback term.
    pub predicted_bits_basic: f64,
    pub predicted_bits_partitioned: f64,
}

impl StatsReport {
    pub fn compute(spss: &SpssInput, f: &AnyLpMphf) -> Result<Self> {
        let scheme: &MinimizerScheme = f.scheme();
        let w = scheme.w();
        let records = scheme.split_all(spss)?;
        let census = MinimizerCensus::from_records(&records);
        let n = spss.num_kmers();
        let b = f.minimizer_mphf_bits_per_key();
        let xi = census.xi();
        let fallback_bits = xi * f.fallback().bits_per_key();
        let (basic, part) = match TheoryParams::new(scheme.k() as u32, scheme.m() as u32, b) {
            Ok(p) => (
                p.basic_bits_per_kmer() + fallback_bits,
                p.partitioned_bits_per_kmer() + fallback_bits,
            ),
            Err(_) => (f64::NAN, f64::NAN),
        };
        Ok(StatsReport {
            variant: f.variant().to_string(),
            k: scheme.k(),
            m: scheme.m(),
            w,
            num_kmers: n,
            num_strings: spss.num_strings(),
            alpha: spss.fragmentation(),
            xi,
            num_minimizers: f.num_minimizers(),
            num_ambiguous_minimizers: census.num_ambiguous(),
            num_super_kmers: records.len(),
            epsilon: measure_epsilon(f, spss),
            measured_density: records.len() as f64 / n.max(1) as f64,
            predicted_density: 2.0 / (w as f64 + 1.0),
            measured_types: measured_type_proportions(&records, &census, w as u32),
            computed_types: type_probabilities::<f64>(w as u32).as_array(),
            b_minimizer_mphf: b,
            bits_per_kmer: f.bits_per_kmer(),
            predicted_bits_basic: basic,
            predicted_bits_partitioned: part,
        })
    }

    /// Closed-form bits per k-mer for the layout this report describes.
    pub fn predicted_bits(&self) -> f64 {
        if self.variant == Variant::Basic.to_string() {
            self.predicted_bits_basic
        } else {
            self.predicted_bits_partitioned
        }
    }

    fn fields(&self) -> Vec<(&'static str, String)> {
        let t = |a: &[f64; 4], i: usize| format!("{:.6}", a[i]);
        vec![
            ("variant", self.variant.clone()),
            ("k", self.k.to_string()),
            ("m", self.m.to_string()),
            ("w", self.w.to_string()),
            ("n", self.num_kmers.to_string()),
            ("strings", self.num_strings.to_string()),
            ("alpha", format!("{:.6}", self.alpha)),
            ("xi", format!("{:.6}", self.xi)),
            ("minimizers", self.num_minimizers.to_string()),
            (
                "ambiguous_minimizers",
                self.num_ambiguous_minimizers.to_string(),
            ),
            ("super_kmers", self.num_super_kmers.to_string()),
            ("epsilon", format!("{:.6}", self.epsilon)),
            ("density_measured", format!("{:.6}", self.measured_density)),
            ("density_computed", format!("{:.6}", self.predicted_density)),
            ("p_lr_measured", t(&self.measured_types, 0)),
            ("p_l_measured", t(&self.measured_types, 1)),
            ("p_r_measured", t(&self.measured_types, 2)),
            ("p_n_measured", t(&self.measured_types, 3)),
            ("p_lr_computed", t(&self.computed_types, 0)),
            ("p_l_computed", t(&self.computed_types, 1)),
            ("p_r_computed", t(&self.computed_types, 2)),
            ("p_n_computed", t(&self.computed_types, 3)),
            ("b", format!("{:.4}", self.b_minimizer_mphf)),
            ("bits_per_kmer", format!("{:.4}", self.bits_per_kmer)),
            (
                "bits_basic_computed",
                format!("{:.4}", self.predicted_bits_basic),
            ),
            (
                "bits_partitioned_computed",
                format!("{:.4}", self.predicted_bits_partitioned),
            ),
        ]
    }

    /// Header line and one value line, tab-separated.
    pub fn to_tsv(&self) -> String {
        let fields = self.fields();
        let head: Vec<&str> = fields.iter().map(|(k, _)| *k).collect();
        let vals: Vec<&str> = fields.iter().map(|(_, v)| v.as_str()).collect();
        format!("{}\n{}\n", head.join("\t"), vals.join("\t"))
    }

    pub fn to_key_values(&self) -> String {
        self.fields()
            .into_iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is plain data")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::BuildOptions;
    use crate::basic::LpMphfBasic;
    use crate::kmer::HashSeed;
    use crate::partitioned::LpMphfPartitioned;
    use crate::spss::{generate_spss, GenConfig};

    fn spss(length: usize, seed: u64) -> SpssInput {
        generate_spss(GenConfig {
            length,
            k: 31,
            seed,
            records: 1,
        })
        .unwrap()
    }

    #[test]
    fn proportions_converge() {
        let scheme = MinimizerScheme::new(31, 21, HashSeed(17)).unwrap();
        let want = type_probabilities::<f64>(11).as_array();
        for (n, tol) in [(10_000, 0.05), (100_000, 0.03), (1_000_000, 0.02)] {
            let s = spss(n + 30, n as u64);
            let records = scheme.split_all(&s).unwrap();
            let census = MinimizerCensus::from_records(&records);
            let got = measured_type_proportions(&records, &census, 11);
            assert!((got.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            for t in 0..4 {
                assert!((got[t] - want[t]).abs() <= tol, "n={n} t={t} {got:?}");
            }
        }
    }

    #[test]
    fn single_super_kmer_report() {
        let scheme = MinimizerScheme::new(31, 21, HashSeed(2)).unwrap();
        let long = spss(2_000, 2).strings()[0].clone();
        let s = (0..long.len() - 33)
            .map(|i| long[i..i + 33].to_vec())
            .find(|s| scheme.split_superkmers(s, 0).unwrap().len() == 1)
            .unwrap();
        let input = SpssInput::new(vec![s], 31, true).unwrap();
        let f = LpMphfBasic::build(&input, &scheme, &BuildOptions::default()).unwrap();
        let r = StatsReport::compute(&input, &f.into()).unwrap();
        assert_eq!(r.alpha, 0.0);
        assert!((r.epsilon - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn report_fields_and_formats() {
        let input = spss(50_000, 3);
        let scheme = MinimizerScheme::new(31, 15, HashSeed(3)).unwrap();
        let f = LpMphfPartitioned::build(&input, &scheme, &BuildOptions::default()).unwrap();
        let r = StatsReport::compute(&input, &f.into()).unwrap();
        assert!(r.epsilon >= r.alpha + 1.0 / r.num_kmers as f64);
        assert_eq!(r.variant, "partitioned");
        assert_eq!(r.predicted_bits(), r.predicted_bits_partitioned);
        let tsv = r.to_tsv();
        let lines: Vec<&str> = tsv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].split('\t').count(), lines[1].split('\t').count());
        assert!(r.to_key_values().contains("variant=partitioned\n"));
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["num_kmers"], r.num_kmers);
    }

    #[test]
    fn epsilon_at_least_fragmentation_bound() {
        let base = spss(20_000, 4);
        let pieces: Vec<Vec<u8>> = base.strings()[0]
            .chunks(200)
            .filter(|c| c.len() >= 31)
            .map(|c| c.to_vec())
            .collect();
        let input = SpssInput::new(pieces, 31, true).unwrap();
        let scheme = MinimizerScheme::new(31, 15, HashSeed(4)).unwrap();
        let f = LpMphfBasic::build(&input, &scheme, &BuildOptions::default()).unwrap();
        let eps = measure_epsilon(&f, &input);
        assert!(eps >= input.fragmentation() + 1.0 / input.num_kmers() as f64);
    }
}
