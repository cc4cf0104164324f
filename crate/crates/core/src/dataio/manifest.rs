use std::collections::HashSet;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::DataError;

macro_rules! string_enum {
    ($(#[$meta:meta])* $name:ident, $field:literal { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $text)] $variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl FromStr for $name {
            type Err = DataError;

            fn from_str(s: &str) -> Result<Self, DataError> {
                match s {
                    $($text => Ok($name::$variant),)+
                    other => Err(DataError::UnknownEnumValue {
                        field: $field,
                        value: other.to_string(),
                    }),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

string_enum!(
    /// Medical specialty a record belongs to.
    Specialty, "specialty" {
        Radiology => "radiology",
        Dermatology => "dermatology",
        Pathology => "pathology",
        Ophthalmology => "ophthalmology",
        Surgery => "surgery",
        Gastroenterology => "gastroenterology",
    }
);

string_enum!(
    /// Acquisition modality of an image.
    ImageType, "image_type" {
        ComputedTomography => "computed_tomography",
        XRay => "x_ray",
        MagneticResonanceImaging => "magnetic_resonance_imaging",
        Ultrasound => "ultrasound",
        Endoscopy => "endoscopy",
        Microscopy => "microscopy",
        Fundoscopy => "fundoscopy",
        OpticalCoherenceTomography => "optical_coherence_tomography",
        Dermoscopy => "dermoscopy",
        ClinicalImage => "clinical_image",
    }
);

string_enum!(
    /// Dataset partition.
    Split, "split" {
        Train => "train",
        Val => "val",
        Test => "test",
    }
);

/// One image-text pair of the catalog.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageRecord {
    pub id: String,
    pub image_path: PathBuf,
    pub specialty: Specialty,
    pub image_type: ImageType,
    pub labels: Vec<String>,
    pub patient_id: Option<String>,
    pub prompt: Option<String>,
    pub split: Option<Split>,
}

/// Ordered catalog of records, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub records: Vec<ImageRecord>,
    /// Hex SHA-256 of the bytes the manifest was parsed from.
    pub source_digest: String,
}

impl Manifest {
    /// Builds a manifest from records, checking id uniqueness. The digest is
    /// taken over the canonical JSON-lines serialization.
    pub fn from_records(records: Vec<ImageRecord>) -> Result<Self, DataError> {
        check_unique(&records)?;
        let mut buf = Vec::new();
        write_records(&mut buf, &records).expect("writing to a Vec cannot fail");
        Ok(Manifest {
            records,
            source_digest: digest(&buf),
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&ImageRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    /// Id → record lookup table.
    pub fn index(&self) -> std::collections::HashMap<&str, &ImageRecord> {
        self.records.iter().map(|r| (r.id.as_str(), r)).collect()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Line {
    id: String,
    image_path: String,
    specialty: String,
    image_type: String,
    labels: Vec<String>,
    #[serde(default)]
    patient_id: Option<String>,
    #[serde(default)]
    prompt: Option<String>,
    #[serde(default)]
    split: Option<String>,
}

impl Line {
    fn into_record(self) -> Result<ImageRecord, DataError> {
        Ok(ImageRecord {
            specialty: self.specialty.parse()?,
            image_type: self.image_type.parse()?,
            split: self.split.as_deref().map(str::parse).transpose()?,
            id: self.id,
            image_path: PathBuf::from(self.image_path),
            labels: self.labels,
            patient_id: self.patient_id,
            prompt: self.prompt,
        })
    }

    fn from_record(r: &ImageRecord) -> Self {
        Line {
            id: r.id.clone(),
            image_path: r.image_path.to_string_lossy().into_owned(),
            specialty: r.specialty.as_str().to_string(),
            image_type: r.image_type.as_str().to_string(),
            labels: r.labels.clone(),
            patient_id: r.patient_id.clone(),
            prompt: r.prompt.clone(),
            split: r.split.map(|s| s.as_str().to_string()),
        }
    }
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn check_unique(records: &[ImageRecord]) -> Result<(), DataError> {
    let mut seen = HashSet::with_capacity(records.len());
    for r in records {
        if !seen.insert(r.id.as_str()) {
            return Err(DataError::DuplicateId(r.id.clone()));
        }
    }
    Ok(())
}

/// Parses JSON-lines manifest text. Blank lines are skipped; line numbers in
/// errors are 1-based.
pub fn parse_manifest(text: &str) -> Result<Manifest, DataError> {
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Line = serde_json::from_str(line).map_err(|e| DataError::MalformedLine {
            line: i + 1,
            message: e.to_string(),
        })?;
        let record = parsed.into_record()?;
        if !seen.insert(record.id.clone()) {
            return Err(DataError::DuplicateId(record.id));
        }
        records.push(record);
    }
    Ok(Manifest {
        records,
        source_digest: digest(text.as_bytes()),
    })
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<Manifest, DataError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| DataError::io(path, e))?;
    parse_manifest(&text)
}

fn write_records<W: Write>(mut w: W, records: &[ImageRecord]) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, &Line::from_record(r))?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Writes records as JSON lines with every key present (nullable keys as `null`).
pub fn write_manifest(manifest: &Manifest, path: impl AsRef<Path>) -> Result<(), DataError> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| DataError::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    write_records(&mut w, &manifest.records)
        .and_then(|_| w.flush())
        .map_err(|e| DataError::io(path, e))
}
