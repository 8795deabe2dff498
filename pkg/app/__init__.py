# Peak Analyzer - 안정 선형 차분방정식의 피크 효과 분석
