#pragma once

#include <afm/codec.hpp>
#include <afm/errors.hpp>
#include <afm/geometry.hpp>
#include <afm/harness.hpp>
#include <afm/io.hpp>
#include <afm/metrics.hpp>
#include <afm/squeeze.hpp>
#include <afm/transforms.hpp>
