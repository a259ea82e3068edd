#pragma once

#include "monofam/builders.hpp"
#include "monofam/family.hpp"
#include "monofam/io.hpp"
#include "monofam/isomorphism.hpp"
#include "monofam/oracle.hpp"
#include "monofam/properties.hpp"
#include "monofam/section.hpp"
#include "monofam/sobolev.hpp"
