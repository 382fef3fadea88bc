//! Structure file layout.
//!
//! All integers little-endian:
//!
//! ```text
//! magic "LPH1" | version u32 | variant u8 | k u8 | m u8 | reserved u8
//! seed u64 | n u64 | |M| u64 | n_unambiguous u64
//! variant body
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::basic::LpMphfBasic;
use crate::error::{Error, Result};
use crate::kmer::HashSeed;
use crate::lookup::{Bucket, LpHash};
use crate::minimizer::MinimizerScheme;
use crate::mphf::GeneralMphf;
use crate::partitioned::LpMphfPartitioned;

pub const MAGIC: [u8; 4] = *b"LPH1";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Basic,
    Partitioned,
}

impl Variant {
    fn code(self) -> u8 {
        match self {
            Variant::Basic => 0,
            Variant::Partitioned => 1,
        }
    }

    fn from_code(c: u8) -> Result<Self> {
        match c {
            0 => Ok(Variant::Basic),
            1 => Ok(Variant::Partitioned),
            _ => Err(Error::Corrupt(format!("unknown variant {c}"))),
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "basic" => Ok(Variant::Basic),
            "partitioned" => Ok(Variant::Partitioned),
            _ => Err(Error::InvalidParams(format!("unknown variant {s:?}"))),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Basic => "basic",
            Variant::Partitioned => "partitioned",
        })
    }
}

/// Fixed-size file header.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Header {
    pub variant: Variant,
    pub k: usize,
    pub m: usize,
    pub seed: u64,
    pub num_kmers: u64,
    pub num_minimizers: u64,
    pub num_unambiguous: u64,
}

impl Header {
    pub(crate) fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        out.write_all(&MAGIC)?;
        out.write_u32::<LittleEndian>(FORMAT_VERSION)?;
        out.write_all(&[self.variant.code(), self.k as u8, self.m as u8, 0])?;
        out.write_u64::<LittleEndian>(self.seed)?;
        out.write_u64::<LittleEndian>(self.num_kmers)?;
        out.write_u64::<LittleEndian>(self.num_minimizers)?;
        out.write_u64::<LittleEndian>(self.num_unambiguous)?;
        Ok(())
    }

    pub(crate) fn read_from<R: Read>(input: &mut R) -> Result<Self> {
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic)?;
        if magic != MAGIC {
            return Err(Error::BadMagic(magic));
        }
        let version = input.read_u32::<LittleEndian>()?;
        if version != FORMAT_VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        let mut b = [0u8; 4];
        input.read_exact(&mut b)?;
        let variant = Variant::from_code(b[0])?;
        Ok(Header {
            variant,
            k: b[1] as usize,
            m: b[2] as usize,
            seed: input.read_u64::<LittleEndian>()?,
            num_kmers: input.read_u64::<LittleEndian>()?,
            num_minimizers: input.read_u64::<LittleEndian>()?,
            num_unambiguous: input.read_u64::<LittleEndian>()?,
        })
    }

    pub(crate) fn scheme(&self) -> Result<MinimizerScheme> {
        MinimizerScheme::new(self.k, self.m, HashSeed(self.seed))
            .map_err(|e| Error::Corrupt(format!("header parameters: {e}")))
    }
}

pub(crate) fn header_of<H: LpHash>(f: &H, variant: Variant) -> Header {
    let s = f.scheme();
    Header {
        variant,
        k: s.k(),
        m: s.m(),
        seed: s.seed().0,
        num_kmers: f.num_kmers(),
        num_minimizers: f.num_minimizers(),
        num_unambiguous: f.num_unambiguous(),
    }
}

/// Either layout, as read back from a structure file.
#[derive(Clone, Debug)]
pub enum AnyLpMphf {
    Basic(LpMphfBasic),
    Partitioned(LpMphfPartitioned),
}

impl AnyLpMphf {
    pub fn variant(&self) -> Variant {
        match self {
            AnyLpMphf::Basic(_) => Variant::Basic,
            AnyLpMphf::Partitioned(_) => Variant::Partitioned,
        }
    }

    pub fn read_from<R: Read>(input: &mut R) -> Result<Self> {
        let header = Header::read_from(input)?;
        Ok(match header.variant {
            Variant::Basic => AnyLpMphf::Basic(LpMphfBasic::read_body(header, input)?),
            Variant::Partitioned => {
                AnyLpMphf::Partitioned(LpMphfPartitioned::read_body(header, input)?)
            }
        })
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        match self {
            AnyLpMphf::Basic(f) => f.write_to(out),
            AnyLpMphf::Partitioned(f) => f.write_to(out),
        }
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self> {
        let mut input = BufReader::new(File::open(path)?);
        let f = Self::read_from(&mut input)?;
        let mut rest = [0u8; 1];
        if input.read(&mut rest)? != 0 {
            return Err(Error::Corrupt("trailing bytes after structure".into()));
        }
        Ok(f)
    }

    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        self.write_to(&mut out)?;
        out.flush()?;
        Ok(())
    }
}

macro_rules! dispatch {
    ($self:ident, $f:ident => $e:expr) => {
        match $self {
            AnyLpMphf::Basic($f) => $e,
            AnyLpMphf::Partitioned($f) => $e,
        }
    };
}

impl LpHash for AnyLpMphf {
    fn scheme(&self) -> &MinimizerScheme {
        dispatch!(self, f => f.scheme())
    }

    fn num_kmers(&self) -> u64 {
        dispatch!(self, f => f.num_kmers())
    }

    fn num_unambiguous(&self) -> u64 {
        dispatch!(self, f => f.num_unambiguous())
    }

    fn num_minimizers(&self) -> u64 {
        dispatch!(self, f => f.num_minimizers())
    }

    #[inline]
    fn bucket(&self, minimizer: u64) -> Bucket {
        dispatch!(self, f => f.bucket(minimizer))
    }

    fn fallback(&self) -> &GeneralMphf {
        dispatch!(self, f => f.fallback())
    }

    fn minimizer_mphf_bits_per_key(&self) -> f64 {
        dispatch!(self, f => f.minimizer_mphf_bits_per_key())
    }

    fn serialized_bytes(&self) -> usize {
        dispatch!(self, f => LpHash::serialized_bytes(f))
    }
}

impl From<LpMphfBasic> for AnyLpMphf {
    fn from(f: LpMphfBasic) -> Self {
        AnyLpMphf::Basic(f)
    }
}

impl From<LpMphfPartitioned> for AnyLpMphf {
    fn from(f: LpMphfPartitioned) -> Self {
        AnyLpMphf::Partitioned(f)
    }
}

pub(crate) fn check_header_counts<H: LpHash>(header: &Header, f: &H) -> Result<()> {
    if header.num_minimizers != f.num_minimizers() {
        return Err(Error::Corrupt("minimizer count mismatch".into()));
    }
    if f.fallback().num_keys() != header.num_kmers - header.num_unambiguous {
        return Err(Error::Corrupt("fallback key count mismatch".into()));
    }
    Ok(())
}
