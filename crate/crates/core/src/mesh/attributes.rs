/// A named array holding `width` values per vertex or facet slot.
#[derive(Clone, Debug, PartialEq)]
pub struct Attribute<T> {
    pub(crate) name: String,
    pub(crate) width: usize,
    pub(crate) data: Vec<T>,
}

impl<T> Attribute<T> {
    pub(crate) fn new(name: &str, width: usize, data: Vec<T>) -> Self {
        Attribute {
            name: name.to_string(),
            width,
            data,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn get(&self, slot: usize) -> &[T] {
        &self.data[slot * self.width..(slot + 1) * self.width]
    }

    #[inline]
    pub(crate) fn get_mut(&mut self, slot: usize) -> &mut [T] {
        &mut self.data[slot * self.width..(slot + 1) * self.width]
    }
}
