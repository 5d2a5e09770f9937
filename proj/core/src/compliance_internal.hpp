#pragma once

#include "json_util.hpp"
#include "tmforge/compliance.hpp"

namespace tmforge {

// Parses one matrix object ({"provider", "framework", "cells": {...}}).
// Shared between the public text loader and the fixture tree loader.
Loaded<ComplianceMatrix> load_compliance_matrix_json(const jsonutil::json& doc,
                                                     const std::string& filename);

}  // namespace tmforge
