# CLI 패키지
