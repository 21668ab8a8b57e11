//! On-disk form of a construction bundle: the instance file, two packing
//! documents and a JSON manifest with every parameter as an exact `p/q`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::poa::{ConstructionBundle, Mode, NeBinKind, PoaParams, Recurrence};
use crate::error::{Error, Result};
use crate::model::{parse_instance, serialize_instance, PackingDocument};
use crate::rational::{parse_rational, to_pq};
use crate::FORMAT_VERSION;

pub const INSTANCE_FILE: &str = "instance.txt";
pub const OPT_FILE: &str = "opt.json";
pub const NE_FILE: &str = "ne.json";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Items sharing a family label, with their size range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyEntry {
    pub family: String,
    pub count: usize,
    pub smallest: String,
    pub largest: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleManifest {
    pub format: u32,
    pub t: u32,
    pub s: u32,
    pub n: u64,
    pub mode: Mode,
    pub recurrence: Recurrence,
    pub r: Vec<u64>,
    pub d: Vec<u64>,
    /// `δ_0 ..= δ_s`.
    pub delta: Vec<String>,
    pub big_delta: String,
    pub opt_bins: usize,
    pub ne_bins: usize,
    pub ne_layout: Vec<(NeBinKind, usize)>,
    pub families: Vec<FamilyEntry>,
    pub labels: Vec<String>,
    pub notes: Vec<String>,
}

/// Family name of a label: `sigma03^7` becomes `sigma03`.
fn family_of(label: &str) -> &str {
    label.split('^').next().unwrap_or(label)
}

impl BundleManifest {
    pub fn from_bundle(bundle: &ConstructionBundle) -> BundleManifest {
        let p = &bundle.params;
        let mut families: BTreeMap<&str, (usize, _, _)> = BTreeMap::new();
        let mut order = Vec::new();
        for (item, label) in bundle.instance.items().iter().zip(&bundle.labels) {
            let name = family_of(label);
            let entry = families.entry(name).or_insert_with(|| {
                order.push(name);
                (0, item.size.clone(), item.size.clone())
            });
            entry.0 += 1;
            if item.size < entry.1 {
                entry.1 = item.size.clone();
            }
            if item.size > entry.2 {
                entry.2 = item.size.clone();
            }
        }
        let families = order
            .iter()
            .map(|name| {
                let (count, lo, hi) = &families[name];
                FamilyEntry {
                    family: name.to_string(),
                    count: *count,
                    smallest: to_pq(lo),
                    largest: to_pq(hi),
                }
            })
            .collect();
        BundleManifest {
            format: FORMAT_VERSION,
            t: p.t,
            s: p.s,
            n: p.n,
            mode: p.mode,
            recurrence: p.recurrence,
            r: p.r.clone(),
            d: p.d.clone(),
            delta: (0..=p.s).map(|j| to_pq(&p.delta(j))).collect(),
            big_delta: to_pq(&p.big_delta()),
            opt_bins: bundle.opt.bin_count(),
            ne_bins: bundle.ne.bin_count(),
            ne_layout: bundle.ne_layout(),
            families,
            labels: bundle.labels.clone(),
            notes: bundle.notes.clone(),
        }
    }

    pub fn render(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("manifest serializes");
        out.push('\n');
        out
    }

    pub fn parse(text: &str) -> Result<BundleManifest> {
        let m: BundleManifest =
            serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        for value in m.delta.iter().chain([&m.big_delta]) {
            parse_rational(value).map_err(Error::Document)?;
        }
        Ok(m)
    }

    /// Recomputes the parameters and rejects a manifest whose sequences or
    /// perturbations disagree with them.
    pub fn params(&self) -> Result<PoaParams> {
        let p = PoaParams::new(self.t, self.s, self.n, self.mode, self.recurrence)?;
        let delta: Vec<String> = (0..=p.s).map(|j| to_pq(&p.delta(j))).collect();
        if p.r != self.r
            || p.d != self.d
            || delta != self.delta
            || to_pq(&p.big_delta()) != self.big_delta
        {
            return Err(Error::Mismatch(
                "manifest parameters disagree with (t, s, n)".into(),
            ));
        }
        Ok(p)
    }
}

/// The four bundle files as `(file name, contents)`.
pub fn render_bundle(bundle: &ConstructionBundle) -> Vec<(&'static str, String)> {
    vec![
        (INSTANCE_FILE, serialize_instance(&bundle.instance)),
        (
            OPT_FILE,
            PackingDocument::from_packing(&bundle.opt).render(),
        ),
        (NE_FILE, PackingDocument::from_packing(&bundle.ne).render()),
        (MANIFEST_FILE, BundleManifest::from_bundle(bundle).render()),
    ]
}

/// Reassembles a bundle from file contents. Packings are attached without
/// validation so that verification can report on them.
pub fn parse_bundle(
    instance: &str,
    opt: &str,
    ne: &str,
    manifest: &str,
) -> Result<ConstructionBundle> {
    let manifest = BundleManifest::parse(manifest)?;
    let params = manifest.params()?;
    let instance = Arc::new(parse_instance(instance)?);
    if manifest.labels.len() != instance.len() {
        return Err(Error::Mismatch(format!(
            "manifest labels {} items, instance has {}",
            manifest.labels.len(),
            instance.len()
        )));
    }
    let opt = PackingDocument::parse(opt)?.to_packing(Arc::clone(&instance));
    let ne = PackingDocument::parse(ne)?.to_packing(Arc::clone(&instance));
    let ne_kinds = manifest
        .ne_layout
        .iter()
        .flat_map(|&(kind, count)| std::iter::repeat_n(kind, count))
        .collect();
    Ok(ConstructionBundle {
        params,
        instance,
        opt,
        ne,
        ne_kinds,
        labels: manifest.labels,
        notes: manifest.notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_poa_lower, verify_poa_construction};

    #[test]
    fn manifest_round_trips_bit_exactly() {
        let b = gen_poa_lower(2, 2, 274, Mode::Exact, Recurrence::Balanced).unwrap();
        let text = BundleManifest::from_bundle(&b).render();
        let back = BundleManifest::parse(&text).unwrap();
        assert_eq!(back.render(), text);
        assert_eq!(back.params().unwrap(), b.params);
        assert_eq!(back.families[0].family, "sigma01");
    }

    #[test]
    fn bundle_files_round_trip() {
        let b = gen_poa_lower(2, 2, 274, Mode::Exact, Recurrence::Balanced).unwrap();
        let files = render_bundle(&b);
        let get = |name| files.iter().find(|(n, _)| *n == name).unwrap().1.as_str();
        let back = parse_bundle(
            get(INSTANCE_FILE),
            get(OPT_FILE),
            get(NE_FILE),
            get(MANIFEST_FILE),
        )
        .unwrap();
        assert_eq!(back.ne, b.ne);
        assert_eq!(back.ne_kinds, b.ne_kinds);
        assert!(verify_poa_construction(&back).passed());
    }

    #[test]
    fn edited_manifest_is_rejected() {
        let b = gen_poa_lower(2, 2, 274, Mode::Exact, Recurrence::Balanced).unwrap();
        let mut m = BundleManifest::from_bundle(&b);
        m.r[1] += 1;
        assert!(matches!(
            BundleManifest::parse(&m.render()).unwrap().params(),
            Err(Error::Mismatch(_))
        ));
    }
}
