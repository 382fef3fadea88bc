//! Little-endian binary encoding shared by every stored component.

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::error::{Error, Result};

/// A component with a self-delimiting binary form.
pub trait Persist: Sized {
    fn write_to<W: Write>(&self, out: &mut W) -> Result<()>;
    fn read_from<R: Read>(input: &mut R) -> Result<Self>;

    /// Size of the binary form in bytes.
    fn serialized_bytes(&self) -> usize {
        let mut counter = ByteCounter(0);
        self.write_to(&mut counter)
            .expect("counting sink never fails");
        counter.0
    }
}

#[derive(Default)]
pub(crate) struct ByteCounter(pub usize);

impl Write for ByteCounter {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        self.0 += buf.len();
        Ok(buf.len())
    }

    fn flush(&mut self) -> std::io::Result<()> {
        Ok(())
    }
}

pub(crate) fn write_u64<W: Write>(out: &mut W, v: u64) -> Result<()> {
    out.write_u64::<LittleEndian>(v)?;
    Ok(())
}

pub(crate) fn read_u64<R: Read>(input: &mut R) -> Result<u64> {
    Ok(input.read_u64::<LittleEndian>()?)
}

pub(crate) fn read_usize<R: Read>(input: &mut R) -> Result<usize> {
    let v = read_u64(input)?;
    usize::try_from(v).map_err(|_| Error::Corrupt(format!("length {v} does not fit in memory")))
}

pub(crate) fn write_words<W: Write>(out: &mut W, words: &[u64]) -> Result<()> {
    write_u64(out, words.len() as u64)?;
    for &w in words {
        out.write_u64::<LittleEndian>(w)?;
    }
    Ok(())
}

pub(crate) fn read_words<R: Read>(input: &mut R) -> Result<Vec<u64>> {
    let len = read_usize(input)?;
    // grow incrementally so a corrupt length cannot trigger a huge allocation
    let mut words = Vec::with_capacity(len.min(1 << 16));
    for _ in 0..len {
        words.push(input.read_u64::<LittleEndian>()?);
    }
    Ok(words)
}

pub(crate) fn expect(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Corrupt(what.to_string()))
    }
}
