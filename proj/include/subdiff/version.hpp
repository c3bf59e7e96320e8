#pragma once

#define SUBDIFF_VERSION "1.0.0"
