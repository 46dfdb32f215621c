//! Sampled max-norm gaps between fields of the same shape.

use haantjes::check::sampled;
use haantjes::linalg::{max_difference, max_difference_vec, max_modulus};
use haantjes::{BivectorField, Field, MatrixField, OneFormField, OperatorField, Residual, Sample, Scalar, VectorField};

use crate::error::Result;

pub fn vector_gap<S: Scalar>(a: &VectorField, b: &VectorField, sample: &Sample<S>) -> Result<Residual> {
    Ok(sampled(sample, |p| Ok(max_difference_vec(&a.eval(p)?, &b.eval(p)?)))?)
}

pub fn vector_norm<S: Scalar>(a: &VectorField, sample: &Sample<S>) -> Result<Residual> {
    Ok(sampled(sample, |p| Ok(max_modulus(a.eval(p)?.iter())))?)
}

pub fn oneform_gap<S: Scalar>(a: &OneFormField, b: &OneFormField, sample: &Sample<S>) -> Result<Residual> {
    Ok(sampled(sample, |p| Ok(max_difference_vec(&a.eval(p)?, &b.eval(p)?)))?)
}

pub fn matrix_gap<S: Scalar>(a: &MatrixField, b: &MatrixField, sample: &Sample<S>) -> Result<Residual> {
    Ok(sampled(sample, |p| Ok(max_difference(&a.eval(p)?, &b.eval(p)?)))?)
}

pub fn operator_gap<S: Scalar>(a: &OperatorField, b: &OperatorField, sample: &Sample<S>) -> Result<Residual> {
    Ok(sampled(sample, |p| Ok(max_difference(&a.eval(p)?, &b.eval(p)?)))?)
}

pub fn bivector_gap<S: Scalar>(a: &BivectorField, b: &BivectorField, sample: &Sample<S>) -> Result<Residual> {
    Ok(sampled(sample, |p| Ok(max_difference(&a.eval(p)?, &b.eval(p)?)))?)
}

pub fn operator_norm<S: Scalar>(a: &OperatorField, sample: &Sample<S>) -> Result<Residual> {
    Ok(sampled(sample, |p| Ok(max_modulus(a.eval(p)?.iter())))?)
}
