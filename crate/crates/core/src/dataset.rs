//! Kernel datasets: the shipped measurement set and dataset validation.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::concurrency::GridSpec;
use crate::model::KernelProfile;
use crate::Result;

/// Current dataset schema version.
pub const DATASET_VERSION: u32 = 1;

/// Descriptive data of the reference fabric all kernels are normalized to.
#[derive(Debug, Clone, PartialEq)]
pub struct FabricInfo {
    pub rows: u32,
    pub cols: u32,
    pub memory_banks: u32,
    pub memory_kb: f64,
    pub clock_mhz: f64,
}

impl Default for FabricInfo {
    /// 8x8 CGRA, 32 banks of shared data memory totalling 256 KB, 100 MHz.
    fn default() -> Self {
        Self {
            rows: 8,
            cols: 8,
            memory_banks: 32,
            memory_kb: 256.0,
            clock_mhz: 100.0,
        }
    }
}

impl FabricInfo {
    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.rows, self.cols)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelDataset {
    pub kernels: Vec<KernelProfile>,
    pub fabric: FabricInfo,
    pub provenance: String,
    pub version: u32,
}

impl KernelDataset {
    pub fn kernel(&self, name: &str) -> Option<&KernelProfile> {
        self.kernels.iter().find(|k| k.name == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.kernels.iter().map(|k| k.name.as_str())
    }

    /// True if any kernel carries estimated values.
    pub fn has_estimates(&self) -> bool {
        self.kernels.iter().any(|k| k.estimated)
    }
}

/// The eight MachSuite kernels mapped to both an ASIC DSA and the 8x8 CGRA.
///
/// Area and energy are the DSA figures normalized to the CGRA. GeMM and FIR
/// fill the whole PE grid; the other utilizations are estimates constrained
/// to below 50% for Conv2D, Stencil3D, Viterbi and AESEncrypt and to a
/// dataset mean of 0.64, and are flagged as such.
pub fn builtin_paper_dataset() -> KernelDataset {
    #[rustfmt::skip]
    const ROWS: [(&str, &str, f64, f64, f64, f64, bool); 8] = [
        // name, domain, area, energy, utilization, memory KB, estimated
        ("GeMM",       "machine learning",   0.41,  0.541, 1.00, 108.0, false),
        ("FFT",        "signal processing",  0.291, 0.283, 0.66,   1.5, true),
        ("Conv2D",     "machine learning",   0.202, 0.410, 0.45,  72.0, true),
        ("Stencil3D",  "image processing",   0.502, 0.511, 0.45, 256.0, true),
        ("Viterbi",    "speech recognition", 0.128, 0.091, 0.45,  52.0, true),
        ("FIR",        "signal processing",  0.396, 0.395, 1.00, 108.0, false),
        ("AESEncrypt", "security",           0.03,  0.04,  0.45,   0.5, true),
        ("KNN",        "machine learning",   0.241, 0.479, 0.66,  22.0, true),
    ];
    let kernels = ROWS
        .iter()
        .map(|&(name, domain, area_norm, energy_norm, utilization, memory_kb, estimated)| {
            KernelProfile {
                name: name.to_string(),
                domain: domain.to_string(),
                area_norm,
                energy_norm,
                utilization,
                memory_kb,
                estimated,
            }
        })
        .collect();
    KernelDataset {
        kernels,
        fabric: FabricInfo::default(),
        provenance: "MachSuite kernels, DSA vs 8x8 CGRA at 40 nm, 100 MHz; \
                     utilizations of FFT, KNN, Conv2D, Stencil3D, Viterbi and AESEncrypt estimated"
            .to_string(),
        version: DATASET_VERSION,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ViolationKind {
    NoKernels,
    DuplicateName,
    InvalidKernel(&'static str),
    FabricMemoryBelowLargestKernel { fabric_kb: f64, largest_kb: f64 },
    InvalidFabric(&'static str),
    UnsupportedVersion(u32),
}

/// One broken dataset invariant, naming the record it applies to.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub record: Option<String>,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let record = self.record.as_deref().unwrap_or("?");
        match &self.kind {
            ViolationKind::NoKernels => f.write_str("dataset has no kernels"),
            ViolationKind::DuplicateName => write!(f, "duplicate kernel name '{record}'"),
            ViolationKind::InvalidKernel(reason) => write!(f, "kernel '{record}': {reason}"),
            ViolationKind::FabricMemoryBelowLargestKernel {
                fabric_kb,
                largest_kb,
            } => write!(
                f,
                "fabric memory below largest kernel ({fabric_kb} KB < {largest_kb} KB of '{record}')"
            ),
            ViolationKind::InvalidFabric(reason) => write!(f, "fabric: {reason}"),
            ViolationKind::UnsupportedVersion(v) => {
                write!(f, "unsupported dataset version {v} (expected {DATASET_VERSION})")
            }
        }
    }
}

/// Checks every dataset invariant and reports all violations found.
pub fn validate_dataset(ds: &KernelDataset) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |record: Option<&str>, kind| {
        out.push(Violation {
            record: record.map(ToString::to_string),
            kind,
        })
    };
    if ds.version != DATASET_VERSION {
        push(None, ViolationKind::UnsupportedVersion(ds.version));
    }
    if ds.kernels.is_empty() {
        push(None, ViolationKind::NoKernels);
    }
    for (i, k) in ds.kernels.iter().enumerate() {
        if let Some(reason) = k.check() {
            push(Some(&k.name), ViolationKind::InvalidKernel(reason));
        }
        // Reported once per name, at its second occurrence.
        if ds.kernels[..i].iter().filter(|o| o.name == k.name).count() == 1 {
            push(Some(&k.name), ViolationKind::DuplicateName);
        }
    }
    let fabric = &ds.fabric;
    if fabric.rows == 0 || fabric.cols == 0 {
        push(None, ViolationKind::InvalidFabric("grid rows and columns must be >= 1"));
    }
    if !(fabric.memory_kb.is_finite() && fabric.memory_kb >= 0.0) {
        push(None, ViolationKind::InvalidFabric("memory_kb must be >= 0"));
    }
    if !(fabric.clock_mhz.is_finite() && fabric.clock_mhz > 0.0) {
        push(None, ViolationKind::InvalidFabric("clock_mhz must be > 0"));
    }
    let largest = ds
        .kernels
        .iter()
        .filter(|k| k.memory_kb.is_finite())
        .max_by(|a, b| a.memory_kb.total_cmp(&b.memory_kb));
    if let Some(k) = largest {
        if fabric.memory_kb < k.memory_kb {
            push(
                Some(&k.name),
                ViolationKind::FabricMemoryBelowLargestKernel {
                    fabric_kb: fabric.memory_kb,
                    largest_kb: k.memory_kb,
                },
            );
        }
    }
    out
}
